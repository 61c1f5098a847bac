#include "faan/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace faan {

double ledermann_bound(int n) {
    if (n < 1) throw std::invalid_argument("ledermann_bound: n must be >= 1");
    return (2.0 * n + 1.0 - std::sqrt(8.0 * n + 1.0)) / 2.0;
}

ParamCounts param_counts(int n, int r) {
    if (n < 1 || r < 0 || r >= n)
        throw std::invalid_argument("param_counts: need 0 <= r < n");
    const long long nn = n;
    const long long rr = r;
    return {(nn - rr) * rr + rr * (rr + 1) / 2 + nn, nn * (nn + 1) / 2};
}

int guttman_bound(const SampleCov& scm, double rel_tol) {
    const Matrix& rhat = scm.matrix();
    Eigen::FullPivLU<Matrix> lu(rhat);
    if (!lu.isInvertible()) throw std::domain_error("guttman_bound: matrix is singular");
    const Vector inv_diag = lu.inverse().diagonal();
    if (!(inv_diag.array() != 0).all())
        throw std::domain_error("guttman_bound: inverse has a zero diagonal entry");

    Matrix arg = rhat;
    arg.diagonal() -= inv_diag.cwiseInverse();
    const Vector ev = sym_eigenvalues(0.5 * (arg + arg.transpose()));
    const double norm = ev.cwiseAbs().maxCoeff();
    if (norm == 0) return 0;
    return static_cast<int>((ev.array() > rel_tol * norm).count());
}

int ceil_mean(std::span<const int> values) {
    if (values.empty()) throw std::invalid_argument("ceil_mean: empty input");
    const long long sum = std::accumulate(values.begin(), values.end(), 0LL);
    const long long count = static_cast<long long>(values.size());
    // exact integer ceiling of sum / count
    long long q = sum / count;
    if (q * count < sum) ++q;
    return static_cast<int>(q);
}

double ruhe_lower_bound(std::span<const double> eigs_a, std::span<const double> eigs_b) {
    if (eigs_a.size() != eigs_b.size())
        throw std::invalid_argument("ruhe_lower_bound: length mismatch");
    auto descending = [](std::span<const double> v) {
        return std::is_sorted(v.begin(), v.end(), std::greater<>());
    };
    if (!descending(eigs_a) || !descending(eigs_b))
        throw std::invalid_argument("ruhe_lower_bound: eigenvalues must be sorted descending");
    const std::size_t n = eigs_a.size();
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += eigs_a[i] * eigs_b[n - 1 - i];
    return sum;
}

std::string_view to_string(Identifiability cls) {
    switch (cls) {
        case Identifiability::globally_identifiable: return "globally identifiable";
        case Identifiability::locally_identifiable: return "locally identifiable";
        case Identifiability::unidentifiable: return "unidentifiable";
    }
    return "?";
}

IdentifiabilityVerdict identifiability_class(int n, int r) {
    if (n < 2 || r < 1 || r >= n)
        throw std::invalid_argument("identifiability_class: need 1 <= r < n");
    const ParamCounts counts = param_counts(n, r);
    IdentifiabilityVerdict v{n, r, ledermann_bound(n), counts.model, counts.constraints,
                             Identifiability::unidentifiable};

    // r vs r_L  <=>  sqrt(s) vs t  with s = 8n + 1, t = 2n + 1 - 2r
    const long long s = 8LL * n + 1;
    const long long t = 2LL * n + 1 - 2LL * r;
    if (t > 0 && s < t * t)
        v.cls = Identifiability::globally_identifiable;
    else if (t >= 0 && s == t * t)
        v.cls = Identifiability::locally_identifiable;
    return v;
}

std::string_view to_string(MleExistence value) {
    switch (value) {
        case MleExistence::exists: return "exists";
        case MleExistence::exists_small_sample: return "exists (small sample)";
        case MleExistence::does_not_exist: return "does not exist";
    }
    return "?";
}

MleExistence mle_existence(long long samples, long long n, long long r) {
    if (samples >= n) return MleExistence::exists;
    if (samples >= r) return MleExistence::exists_small_sample;
    return MleExistence::does_not_exist;
}

int resolvable_sources(int n, bool anisotropic) {
    if (n < 2) throw std::invalid_argument("resolvable_sources: n must be >= 2");
    const double bound = anisotropic ? n / 2.0 + 0.25 * (1.0 - std::sqrt(8.0 * n + 1.0))
                                     : n / 2.0 - 0.5;
    return std::max(0, static_cast<int>(std::floor(bound)));
}

SampleCov frisch_test_matrix(int n, std::uint64_t seed, double spread) {
    if (n < 2) throw std::invalid_argument("frisch_test_matrix: n must be >= 2");
    if (spread < 0 || spread > 1) throw std::invalid_argument("frisch_test_matrix: spread in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> loading(0.5, 1.5);
    std::uniform_real_distribution<double> jitter(1.0 - spread, 1.0 + spread);
    std::uniform_real_distribution<double> margin(0.1, 1.0);

    for (;;) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = loading(rng);
        Matrix inv(n, n);
        for (int i = 0; i < n; ++i) {
            inv(i, i) = v(i) * v(i);
            for (int j = i + 1; j < n; ++j) inv(i, j) = inv(j, i) = v(i) * v(j) * jitter(rng);
        }
        const double lowest = sym_eigenvalues(inv).minCoeff();
        inv.diagonal().array() += std::max(0.0, -lowest) + margin(rng);

        Matrix rhat = inv.inverse();
        rhat = 0.5 * (rhat + rhat.transpose());
        const Matrix check = rhat.inverse();
        if (check.minCoeff() >= -1e-12 * check.cwiseAbs().maxCoeff()) return SampleCov(rhat);
    }
}

double diagonal_matching_residual(const SampleCov& scm, const FactorFit& fit) {
    const Vector d = scm.matrix().diagonal();
    if (!(d.array() != 0).all())
        throw std::invalid_argument("diagonal_matching_residual: zero diagonal entry");
    if (fit.dim() != scm.dim()) throw std::invalid_argument("diagonal_matching_residual: dimension mismatch");
    const Vector model = fit.ssT.diagonal() + fit.sigma_sq;
    return ((model - d).array() / d.array()).abs().maxCoeff();
}

}  // namespace faan

#include "faan/covmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace faan {

namespace {

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument(std::string(what) + ": expected a non-empty square matrix");
}

}  // namespace

SampleCov::SampleCov(const Matrix& m) {
    require_square(m, "SampleCov");
    if (!m.allFinite()) throw std::invalid_argument("SampleCov: non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(scale, 1e-300))
        throw std::invalid_argument("SampleCov: matrix is not symmetric (asymmetry " +
                                    std::to_string(asym) + ")");
    m_ = 0.5 * (m + m.transpose());
}

bool SampleCov::has_positive_diagonal() const { return (m_.diagonal().array() > 0.0).all(); }

void SampleCov::require_positive_diagonal() const {
    if (!has_positive_diagonal())
        throw std::invalid_argument("sample covariance must have a strictly positive diagonal");
}

SampleCov sample_covariance(const Matrix& data, bool center, Divisor divisor) {
    if (data.rows() == 0 || data.cols() == 0)
        throw std::invalid_argument("sample_covariance: empty data");
    if (!data.allFinite()) throw std::invalid_argument("sample_covariance: non-finite entries");
    const auto count = data.cols();
    const double denom = divisor == Divisor::n_samples ? static_cast<double>(count)
                                                       : static_cast<double>(count - 1);
    if (denom <= 0) throw std::invalid_argument("sample_covariance: need N >= 2 for N-1 divisor");
    if (center) {
        const Matrix centered = data.colwise() - data.rowwise().mean();
        return SampleCov(centered * centered.transpose() / denom);
    }
    return SampleCov(data * data.transpose() / denom);
}

std::string_view to_string(SigmaInit init) {
    switch (init) {
        case SigmaInit::identity: return "identity";
        case SigmaInit::diag_of_scm: return "diag";
        case SigmaInit::explicit_vector: return "explicit";
        case SigmaInit::seeded_random: return "random";
    }
    return "?";
}

SigmaInit sigma_init_from_string(std::string_view name) {
    if (name == "identity") return SigmaInit::identity;
    if (name == "diag") return SigmaInit::diag_of_scm;
    if (name == "explicit") return SigmaInit::explicit_vector;
    if (name == "random") return SigmaInit::seeded_random;
    throw std::invalid_argument("unknown sigma init '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
    if (!(epsilon > 0)) throw std::invalid_argument("SolverConfig: epsilon must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (inner_sigma_sweeps < 1)
        throw std::invalid_argument("SolverConfig: inner_sigma_sweeps must be >= 1");
    if (sigma_init == SigmaInit::explicit_vector) {
        if (explicit_sigma_sq.size() == 0 || !(explicit_sigma_sq.array() > 0).all())
            throw std::invalid_argument("SolverConfig: explicit sigma_sq must be strictly positive");
    }
}

Vector initial_sigma_sq(const SampleCov& scm, const SolverConfig& config) {
    const int n = scm.dim();
    switch (config.sigma_init) {
        case SigmaInit::identity: return Vector::Ones(n);
        case SigmaInit::diag_of_scm: return scm.matrix().diagonal();
        case SigmaInit::explicit_vector:
            if (config.explicit_sigma_sq.size() != n)
                throw std::invalid_argument("explicit sigma_sq has wrong dimension");
            return config.explicit_sigma_sq;
        case SigmaInit::seeded_random: {
            // diag(R_hat) scaled entrywise by U(0.1, 2)
            std::mt19937_64 rng(config.seed);
            std::uniform_real_distribution<double> scale(0.1, 2.0);
            Vector out(n);
            for (int k = 0; k < n; ++k) {
                const double d = scm(k, k) > 0 ? scm(k, k) : 1.0;
                out(k) = d * scale(rng);
            }
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::faan: return "faan";
        case Method::fnm: return "fnm";
        case Method::fnm_o: return "fnm_o";
        case Method::isotropic: return "isotropic";
    }
    return "?";
}

Method method_from_string(std::string_view name) {
    if (name == "faan") return Method::faan;
    if (name == "fnm") return Method::fnm;
    if (name == "fnm_o") return Method::fnm_o;
    if (name == "isotropic") return Method::isotropic;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

Matrix FactorFit::covariance() const {
    Matrix cov = ssT;
    cov.diagonal() += sigma_sq;
    return cov;
}

SymEig sym_eig(const Matrix& m) {
    require_square(m, "sym_eig");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
    const Vector& vals = solver.eigenvalues();
    const Matrix& vecs = solver.eigenvectors();
    const int n = static_cast<int>(vals.size());

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals(a) > vals(b); });

    SymEig out{Vector(n), Matrix(n, n)};
    for (int j = 0; j < n; ++j) {
        out.values(j) = vals(order[j]);
        Vector v = vecs.col(order[j]);
        Eigen::Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0) v = -v;
        out.vectors.col(j) = v;
    }
    return out;
}

Vector sym_eigenvalues(const Matrix& m) {
    require_square(m, "sym_eigenvalues");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eigenvalues: failed");
    return solver.eigenvalues().reverse();
}

double gaussian_loss(const SampleCov& scm, const Matrix& model_cov) {
    if (model_cov.rows() != scm.dim() || model_cov.cols() != scm.dim())
        throw std::invalid_argument("gaussian_loss: dimension mismatch");
    Eigen::LLT<Matrix> llt(0.5 * (model_cov + model_cov.transpose()));
    if (llt.info() != Eigen::Success)
        throw std::domain_error("gaussian_loss: model covariance is not positive definite");
    const Matrix& l = llt.matrixL();
    const double logdet = 2.0 * l.diagonal().array().log().sum();
    const double trace = llt.solve(scm.matrix()).trace();
    if (!std::isfinite(logdet) || !std::isfinite(trace))
        throw std::domain_error("gaussian_loss: model covariance is singular");
    return trace + logdet;
}

double gaussian_loss(const SampleCov& scm, const Matrix& ssT, const Vector& sigma_sq) {
    if (sigma_sq.size() != scm.dim())
        throw std::invalid_argument("gaussian_loss: dimension mismatch");
    Matrix cov = ssT;
    cov.diagonal() += sigma_sq;
    return gaussian_loss(scm, cov);
}

double frobenius_loss(const SampleCov& scm, const Matrix& ssT, const Vector& sigma_sq) {
    const int n = scm.dim();
    if (ssT.rows() != n || ssT.cols() != n || sigma_sq.size() != n)
        throw std::invalid_argument("frobenius_loss: dimension mismatch");
    Matrix resid = scm.matrix() - ssT;
    resid.diagonal() -= sigma_sq;
    return resid.norm();
}

Matrix diag_part(const Matrix& m) {
    require_square(m, "diag_part");
    return m.diagonal().asDiagonal();
}

Matrix offdiag_part(const Matrix& m) {
    require_square(m, "offdiag_part");
    Matrix out = m;
    out.diagonal().setZero();
    return out;
}

Matrix clamp_diag_nonneg(const Matrix& m) {
    require_square(m, "clamp_diag_nonneg");
    return m.diagonal().cwiseMax(0.0).asDiagonal();
}

Matrix whiten(const Matrix& m, const Vector& sigma_sq) {
    require_square(m, "whiten");
    if (sigma_sq.size() != m.rows()) throw std::invalid_argument("whiten: dimension mismatch");
    if (!(sigma_sq.array() > 0).all())
        throw std::domain_error("whiten: noise variances must be strictly positive");
    const Vector inv_sd = sigma_sq.array().sqrt().inverse();
    Matrix out = inv_sd.asDiagonal() * m * inv_sd.asDiagonal();
    return 0.5 * (out + out.transpose());
}

Matrix whiten(const SampleCov& scm, const Vector& sigma_sq) { return whiten(scm.matrix(), sigma_sq); }

double relative_decrease(double prev, double cur) {
    if (std::isinf(prev)) return std::numeric_limits<double>::infinity();
    const double denom = cur > 0 ? cur : std::max(std::abs(cur), 1.0);
    return (prev - cur) / denom;
}

bool is_positive_semidefinite(const Matrix& m, double rel_tol) {
    const Vector ev = sym_eigenvalues(0.5 * (m + m.transpose()));
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    return ev.minCoeff() >= -rel_tol * scale;
}

}  // namespace faan

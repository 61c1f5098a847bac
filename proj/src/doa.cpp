#include "faan/doa.hpp"

#include "faan/bounds.hpp"
#include "faan/parallel.hpp"
#include "faan/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace faan {

void ArrayScenario::validate() const {
    if (n < 2) throw std::invalid_argument("ArrayScenario: need at least 2 sensors");
    if (freqs.empty()) throw std::invalid_argument("ArrayScenario: no source frequencies");
    if (snapshots < 1) throw std::invalid_argument("ArrayScenario: snapshots must be >= 1");
    for (double f : freqs)
        if (!(f >= 0.0 && f < 0.5)) throw std::invalid_argument("ArrayScenario: frequency outside [0, 0.5)");
    std::vector<double> sorted = freqs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("ArrayScenario: frequencies must be distinct");
    if (2 * sources() >= n) throw std::invalid_argument("ArrayScenario: need 2m < n");
    if (sources() > resolvable_sources(n, true))
        throw std::invalid_argument("ArrayScenario: more sources than resolvable with anisotropic noise (" +
                                    std::to_string(resolvable_sources(n, true)) + ")");
    if (noise_var.size() != n || !(noise_var.array() > 0).all())
        throw std::invalid_argument("ArrayScenario: need n positive noise variances");
}

Vector draw_noise_variances(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector out(n);
    for (int k = 0; k < n; ++k) {
        double v = 0;
        while (v == 0) v = unit(rng);  // open interval (0, 1)
        out(k) = v;
    }
    return out;
}

ArrayScenario default_scenario(std::uint64_t seed) {
    ArrayScenario scn;
    scn.seed = seed;
    scn.noise_var = draw_noise_variances(scn.n, ~seed);  // stream disjoint from the trial seeds
    return scn;
}

Matrix steering_matrix_real(std::span<const double> freqs, int n) {
    if (freqs.empty()) throw std::invalid_argument("steering_matrix_real: no frequencies");
    if (n < 1) throw std::invalid_argument("steering_matrix_real: n must be >= 1");
    const auto m = static_cast<int>(freqs.size());
    Matrix a(n, 2 * m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < n; ++j) {
            const double phase = 2.0 * std::numbers::pi * freqs[static_cast<std::size_t>(k)] * j;
            a(j, 2 * k) = std::cos(phase);
            a(j, 2 * k + 1) = std::sin(phase);
        }
    }
    return a;
}

Vector scaled_noise_variances(const ArrayScenario& scn) {
    const Matrix a = steering_matrix_real(scn.freqs, scn.n);
    const double signal_power = a.squaredNorm();  // Tr(A A^T)
    const double target = std::pow(10.0, scn.snr_db / 10.0);
    return scn.noise_var * (signal_power / (scn.noise_var.sum() * target));
}

Matrix simulate_array(const ArrayScenario& scn) {
    scn.validate();
    const Matrix a = steering_matrix_real(scn.freqs, scn.n);
    const Vector noise_sd = scaled_noise_variances(scn).array().sqrt();
    std::mt19937_64 rng(scn.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto width = a.cols();
    Matrix signals(width, scn.snapshots);
    Matrix noise(scn.n, scn.snapshots);
    for (int t = 0; t < scn.snapshots; ++t) {
        for (Eigen::Index i = 0; i < width; ++i) signals(i, t) = normal(rng);
        for (int k = 0; k < scn.n; ++k) noise(k, t) = noise_sd(k) * normal(rng);
    }
    return a * signals + noise;
}

std::string_view to_string(MusicMethod method) {
    return method == MusicMethod::faan_basis ? "faan_basis" : "whitened_scm";
}

FrequencyGrid::FrequencyGrid(int n, double step) : step_(step) {
    if (n < 1) throw std::invalid_argument("FrequencyGrid: n must be >= 1");
    if (!(step > 0 && step < 0.5)) throw std::invalid_argument("FrequencyGrid: step must be in (0, 0.5)");
    const auto count = static_cast<Eigen::Index>(std::ceil(0.5 / step - 1e-9));
    points_.resize(count);
    cos_table_.resize(n, count);
    sin_table_.resize(n, count);
    for (Eigen::Index g = 0; g < count; ++g) {
        const double f = static_cast<double>(g) * step;
        points_(g) = f;
        for (int j = 0; j < n; ++j) {
            const double phase = 2.0 * std::numbers::pi * f * j;
            cos_table_(j, g) = std::cos(phase);
            sin_table_(j, g) = std::sin(phase);
        }
    }
}

Vector FrequencyGrid::pseudospectrum(const Matrix& projector) const {
    if (projector.cols() != cos_table_.rows())
        throw std::invalid_argument("pseudospectrum: projector has the wrong width");
    const Matrix pc = projector * cos_table_;
    const Matrix ps = projector * sin_table_;
    return (pc.colwise().squaredNorm() + ps.colwise().squaredNorm()).array().sqrt().transpose();
}

std::vector<double> pick_peaks(const Vector& grid, const Vector& spectrum, int count, int exclusion) {
    const auto size = spectrum.size();
    if (grid.size() != size) throw std::invalid_argument("pick_peaks: grid/spectrum size mismatch");
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index g = 0; g < size; ++g) {
        const double left = g > 0 ? spectrum(g - 1) : -INFINITY;
        const double right = g + 1 < size ? spectrum(g + 1) : -INFINITY;
        if (spectrum(g) > left && spectrum(g) >= right) candidates.push_back(g);
    }
    auto by_height = [&](Eigen::Index a, Eigen::Index b) {
        return spectrum(a) > spectrum(b) || (spectrum(a) == spectrum(b) && a < b);
    };
    std::sort(candidates.begin(), candidates.end(), by_height);

    std::vector<Eigen::Index> chosen;
    auto admissible = [&](Eigen::Index g) {
        return std::none_of(chosen.begin(), chosen.end(),
                            [&](Eigen::Index c) { return std::abs(c - g) <= exclusion; });
    };
    for (Eigen::Index g : candidates) {
        if (static_cast<int>(chosen.size()) == count) break;
        if (admissible(g)) chosen.push_back(g);
    }
    if (static_cast<int>(chosen.size()) < count) {
        // fewer distinct lobes than sources: fall back to the highest grid points
        std::vector<Eigen::Index> all(static_cast<std::size_t>(size));
        for (Eigen::Index g = 0; g < size; ++g) all[static_cast<std::size_t>(g)] = g;
        std::sort(all.begin(), all.end(), by_height);
        for (Eigen::Index g : all) {
            if (static_cast<int>(chosen.size()) == count) break;
            if (admissible(g)) chosen.push_back(g);
        }
    }
    std::vector<double> peaks;
    for (Eigen::Index g : chosen) peaks.push_back(grid(g));
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

MusicResult music_faan(const FactorFit& fit, const FrequencyGrid& grid, int sources) {
    if (fit.rank != 2 * sources) throw std::invalid_argument("music_faan: fit rank must equal 2m");
    if (fit.dim() != grid.sensors()) throw std::invalid_argument("music_faan: sensor count mismatch");
    if (!(fit.lambda.array() > 0).all())
        throw std::domain_error("music_faan: estimated signal basis is rank deficient");
    if (!(fit.sigma_sq.array() > 0).all())
        throw std::domain_error("music_faan: noise variances must be positive");

    const Matrix basis = fit.sigma_sq.array().sqrt().matrix().asDiagonal() * fit.u *
                         fit.lambda.array().sqrt().matrix().asDiagonal();
    const SymEig gram = sym_eig(basis.transpose() * basis);
    if (!(gram.values.array() > 0).all())
        throw std::domain_error("music_faan: estimated signal basis is rank deficient");
    const Matrix inv_sqrt =
        gram.vectors * gram.values.array().rsqrt().matrix().asDiagonal() * gram.vectors.transpose();

    MusicResult out;
    out.method = MusicMethod::faan_basis;
    out.grid = grid.points();
    out.spectrum = grid.pseudospectrum(inv_sqrt * basis.transpose());
    out.peaks = pick_peaks(out.grid, out.spectrum, sources);
    return out;
}

MusicResult music_faan(const FactorFit& fit, double grid_step, int sources) {
    return music_faan(fit, FrequencyGrid(fit.dim(), grid_step), sources);
}

MusicResult music_whitened(const SampleCov& scm, const Vector& sigma_sq, int sources,
                           const FrequencyGrid& grid) {
    if (scm.dim() != grid.sensors()) throw std::invalid_argument("music_whitened: sensor count mismatch");
    if (2 * sources >= scm.dim()) throw std::invalid_argument("music_whitened: need 2m < n");
    const Matrix whitened = whiten(scm, sigma_sq);
    const Matrix signal = sym_eig(whitened).vectors.leftCols(2 * sources);
    const Vector inv_sd = sigma_sq.array().rsqrt();

    MusicResult out;
    out.method = MusicMethod::whitened_scm;
    out.grid = grid.points();
    out.spectrum = grid.pseudospectrum(signal.transpose() * inv_sd.asDiagonal());
    out.peaks = pick_peaks(out.grid, out.spectrum, sources);
    return out;
}

MusicResult music_whitened(const SampleCov& scm, const Vector& sigma_sq, int sources, double grid_step) {
    return music_whitened(scm, sigma_sq, sources, FrequencyGrid(scm.dim(), grid_step));
}

double rmse(const Matrix& estimates, std::span<const double> truth) {
    if (estimates.rows() == 0) throw std::invalid_argument("rmse: no trials");
    const auto m = static_cast<Eigen::Index>(truth.size());
    if (estimates.cols() != m || m == 0) throw std::invalid_argument("rmse: width must match truth");
    std::vector<double> target(truth.begin(), truth.end());
    std::sort(target.begin(), target.end());

    Vector sq = Vector::Zero(m);
    for (Eigen::Index t = 0; t < estimates.rows(); ++t) {
        std::vector<double> row(static_cast<std::size_t>(m));
        for (Eigen::Index k = 0; k < m; ++k) row[static_cast<std::size_t>(k)] = estimates(t, k);
        std::sort(row.begin(), row.end());
        for (Eigen::Index k = 0; k < m; ++k) {
            const double err = row[static_cast<std::size_t>(k)] - target[static_cast<std::size_t>(k)];
            sq(k) += err * err;
        }
    }
    sq /= static_cast<double>(estimates.rows());
    return sq.array().sqrt().mean();
}

std::string_view to_string(SweepVariable var) { return var == SweepVariable::snapshots ? "N" : "snr_db"; }

std::vector<RmseRow> rmse_sweep(const ArrayScenario& base, SweepVariable var,
                                std::span<const double> values, const DoaStudyOptions& options) {
    base.validate();
    if (options.trials < 1) throw std::invalid_argument("rmse_sweep: trials must be >= 1");
    const int m = base.sources();
    const FrequencyGrid grid(base.n, options.grid_step);
    const Vector ones = Vector::Ones(base.n);

    std::vector<RmseRow> rows;
    for (double value : values) {
        Matrix faan_basis(options.trials, m);
        Matrix faan_white(options.trials, m);
        Matrix vanilla(options.trials, m);
        parallel_for(
            options.trials,
            [&](int t) {
                ArrayScenario scn = base;
                if (var == SweepVariable::snapshots)
                    scn.snapshots = static_cast<int>(value);
                else
                    scn.snr_db = value;
                scn.seed = base.seed + static_cast<std::uint64_t>(t);
                const SampleCov scm = sample_covariance(simulate_array(scn));
                const FactorFit f = faan_fit(FitRequest{scm, 2 * m, options.solver, Method::faan});

                auto store = [&](Matrix& dst, const std::vector<double>& peaks) {
                    for (int k = 0; k < m; ++k) dst(t, k) = peaks[static_cast<std::size_t>(k)];
                };
                if ((f.lambda.array() > 0).all())
                    store(faan_basis, music_faan(f, grid, m).peaks);
                else  // a collapsed factor leaves no usable basis; score the whitened estimate
                    store(faan_basis, music_whitened(scm, f.sigma_sq, m, grid).peaks);
                store(faan_white, music_whitened(scm, f.sigma_sq, m, grid).peaks);
                store(vanilla, music_whitened(scm, ones, m, grid).peaks);
            },
            options.threads);

        rows.push_back({value, "faan_basis", rmse(faan_basis, base.freqs), options.trials});
        rows.push_back({value, "faan_whitened", rmse(faan_white, base.freqs), options.trials});
        rows.push_back({value, "vanilla", rmse(vanilla, base.freqs), options.trials});
    }
    return rows;
}

}  // namespace faan

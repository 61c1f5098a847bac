#pragma once

// Direction-of-arrival harness for a uniform linear array: real-valued
// snapshot simulation, MUSIC pseudospectra built from a FAAN fit, and a
// Monte-Carlo RMSE sweep.

#include "faan/covmodel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace faan {

/// Real-valued array scenario. Source covariance is the identity.
struct ArrayScenario {
    int n = 15;
    std::vector<double> freqs{0.2, 0.25};
    int snapshots = 80;
    Vector noise_var;  // n positive pre-scaling variances
    double snr_db = 0.0;
    std::uint64_t seed = 0;

    int sources() const { return static_cast<int>(freqs.size()); }

    /// Checks n, the frequency range [0, 0.5), distinctness, the resolvable
    /// source limit for anisotropic noise, and the noise variances.
    void validate() const;
};

/// i.i.d. U(0, 1) pre-scaling noise variances, deterministic per seed.
Vector draw_noise_variances(int n, std::uint64_t seed);

/// The default scenario: n = 15, f = (0.2, 0.25), noise variances drawn
/// from U(0, 1) (seeded from `seed`) and held fixed.
ArrayScenario default_scenario(std::uint64_t seed = 0);

/// n x 2m matrix with column pairs cos(2 pi f_k j), sin(2 pi f_k j), j = 0..n-1.
Matrix steering_matrix_real(std::span<const double> freqs, int n);

/// Noise variances rescaled by one scalar so that
/// 10 log10(Tr(A A^T) / sum sigma_k^2) equals snr_db.
Vector scaled_noise_variances(const ArrayScenario& scn);

/// n x N snapshots y_t = A s_t + e_t, s_t ~ N(0, I_2m), e_t ~ N(0, diag(scaled
/// variances)); deterministic per scenario seed.
Matrix simulate_array(const ArrayScenario& scn);

enum class MusicMethod { faan_basis, whitened_scm };

std::string_view to_string(MusicMethod method);

struct MusicResult {
    Vector grid;
    Vector spectrum;
    std::vector<double> peaks;  // ascending
    MusicMethod method = MusicMethod::faan_basis;
};

/// Uniform frequency grid over [0, 0.5) with precomputed steering tables,
/// shared across Monte-Carlo trials.
class FrequencyGrid {
public:
    FrequencyGrid(int n, double step);

    int sensors() const { return static_cast<int>(cos_table_.rows()); }
    double step() const { return step_; }
    const Vector& points() const { return points_; }

    /// ||B a(f)||_F on the grid, for B with n columns.
    Vector pseudospectrum(const Matrix& projector) const;

private:
    double step_;
    Vector points_;
    Matrix cos_table_;  // n x G
    Matrix sin_table_;
};

/// Locations of the `count` largest local maxima, with an exclusion radius of
/// `exclusion` grid points between picks; returned ascending.
std::vector<double> pick_peaks(const Vector& grid, const Vector& spectrum, int count,
                               int exclusion = 10);

/// Pseudospectrum ||(S^T S)^{-1/2} S^T a(f)|| with S = Sigma^{1/2} U Lambda^{1/2}.
/// Requires rank = 2m and every lambda > 0.
MusicResult music_faan(const FactorFit& fit, double grid_step, int sources);
MusicResult music_faan(const FactorFit& fit, const FrequencyGrid& grid, int sources);

/// Pseudospectrum ||U_S^T Sigma^{-1/2} a(f)|| with U_S the 2m principal
/// eigenvectors of Sigma^{-1/2} R_hat Sigma^{-1/2}. sigma_sq = 1 gives plain
/// MUSIC on the sample covariance.
MusicResult music_whitened(const SampleCov& scm, const Vector& sigma_sq, int sources,
                           double grid_step);
MusicResult music_whitened(const SampleCov& scm, const Vector& sigma_sq, int sources,
                           const FrequencyGrid& grid);

/// (1/m) sum_k sqrt(mean_t (f_hat_tk - f_k)^2); estimates is trials x m. Rows
/// and truth are matched by sorting (the optimal 1-D assignment).
double rmse(const Matrix& estimates, std::span<const double> truth);

enum class SweepVariable { snapshots, snr_db };

std::string_view to_string(SweepVariable var);

struct RmseRow {
    double value = 0;  // N or SNR (dB)
    std::string method;
    double rmse = 0;
    int trials = 0;
};

struct DoaStudyOptions {
    int trials = 200;
    double grid_step = 1e-4;
    SolverConfig solver{};  // FAAN settings; rank is fixed to 2m
    int threads = 1;
};

/// For every sweep value runs `trials` independent realizations (seed =
/// base.seed + trial index) and reports the RMSE of three estimators:
/// faan_basis, faan_whitened and vanilla (plain MUSIC on the SCM).
std::vector<RmseRow> rmse_sweep(const ArrayScenario& base, SweepVariable var,
                                std::span<const double> values, const DoaStudyOptions& options);

}  // namespace faan

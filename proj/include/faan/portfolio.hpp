#pragma once

// Minimum-variance portfolios: weights, a rolling out-of-sample backtest and
// a synthetic factor-returns generator.

#include "faan/covmodel.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace faan {

/// R^{-1} 1 / (1^T R^{-1} 1). Throws std::domain_error if cov is singular or
/// not positive definite.
Vector min_variance_weights(const Matrix& cov);

/// Minimum-norm solution of the KKT system [2R 1; 1^T 0][w; nu] = [0; 1].
/// Agrees with min_variance_weights for SPD input and stays defined when R is
/// singular.
Vector min_norm_weights(const Matrix& cov);

enum class Estimator { faan_bic, scm, equal_weight };

std::string_view to_string(Estimator est);
Estimator estimator_from_string(std::string_view name);

/// What to do when the estimated covariance is singular.
enum class SingularPolicy { skip, min_norm };

std::string_view to_string(SingularPolicy policy);
SingularPolicy singular_policy_from_string(std::string_view name);

struct BacktestSpec {
    int lookback_N = 60;
    int rebalance_days = 20;
    int horizon_days = 84;
    Estimator estimator = Estimator::faan_bic;
    int r_max = 10;
    SingularPolicy singular = SingularPolicy::skip;
    bool sample_std = false;  // divide by horizon - 1 instead of horizon
    SolverConfig solver{};
    int threads = 1;

    void validate() const;
};

struct BacktestDate {
    int index = 0;  // first out-of-sample row
    bool skipped = false;
    std::string note;
    int rank = 0;  // faan_bic only
    double std_dev = 0;
    Vector weights;
};

struct BacktestResult {
    std::vector<BacktestDate> dates;
    double median_std = 0;

    /// Standard deviations of the non-skipped dates, in date order.
    std::vector<double> per_date_std() const;
    int skipped() const;
};

/// Rolling backtest over returns (T x n, one row per day). Dates are
/// d = lookback_N, lookback_N + rebalance_days, ... while d + horizon_days <= T.
/// Throws std::invalid_argument if T < lookback_N + horizon_days.
BacktestResult run_backtest(const Matrix& returns, const BacktestSpec& spec);

/// Population (or sample) standard deviation of the portfolio returns X w.
double portfolio_std(const Matrix& returns, const Vector& weights, bool sample = false);

/// Median of a non-empty sequence (mean of the two middle values when even).
double median(std::vector<double> values);

struct FactorModel {
    Matrix s;  // n x r loadings
    Vector sigma_sq;

    Matrix covariance() const;
};

/// S_ij ~ N(0, 1); noise variances U(0, 1), rescaled so that
/// 10 log10(Tr(S S^T) / sum sigma_k^2) = snr_db. r = 0 leaves them unscaled.
FactorModel synth_factor_model(int n, int r, double snr_db, std::uint64_t seed);

/// T x n draws from N(0, S S^T + Sigma) of the seeded model.
Matrix synth_factor_returns(int n, int r, double snr_db, int T, std::uint64_t seed);
Matrix synth_factor_returns(const FactorModel& model, int T, std::uint64_t seed);

/// ||R_est - R_true||_F / ||R_true||_F.
double normalized_frobenius_error(const Matrix& estimate, const Matrix& truth);

}  // namespace faan

#include "faan/portfolio.hpp"

#include "faan/parallel.hpp"
#include "faan/ranksel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace faan {

Vector min_variance_weights(const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0)
        throw std::invalid_argument("min_variance_weights: need a non-empty square matrix");
    Eigen::LLT<Matrix> llt(0.5 * (cov + cov.transpose()));
    if (llt.info() != Eigen::Success)
        throw std::domain_error("min_variance_weights: covariance is not positive definite");
    const Vector x = llt.solve(Vector::Ones(cov.rows()));
    const double denom = x.sum();
    if (!(denom > 0) || !x.allFinite())
        throw std::domain_error("min_variance_weights: covariance is numerically singular");
    return x / denom;
}

Vector min_norm_weights(const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0)
        throw std::invalid_argument("min_norm_weights: need a non-empty square matrix");
    const auto n = cov.rows();
    Matrix kkt = Matrix::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = cov + cov.transpose();
    kkt.topRightCorner(n, 1).setOnes();
    kkt.bottomLeftCorner(1, n).setOnes();
    Vector rhs = Vector::Zero(n + 1);
    rhs(n) = 1.0;
    const Vector sol = Eigen::CompleteOrthogonalDecomposition<Matrix>(kkt).solve(rhs);
    Vector w = sol.head(n);
    return w / w.sum();  // remove rounding drift from the budget constraint
}

std::string_view to_string(Estimator est) {
    switch (est) {
        case Estimator::faan_bic: return "faan_bic";
        case Estimator::scm: return "scm";
        case Estimator::equal_weight: return "equal_weight";
    }
    return "?";
}

Estimator estimator_from_string(std::string_view name) {
    if (name == "faan_bic" || name == "faan") return Estimator::faan_bic;
    if (name == "scm") return Estimator::scm;
    if (name == "equal_weight" || name == "ewp") return Estimator::equal_weight;
    throw std::invalid_argument("unknown estimator: " + std::string(name));
}

std::string_view to_string(SingularPolicy policy) {
    return policy == SingularPolicy::skip ? "skip" : "min_norm";
}

SingularPolicy singular_policy_from_string(std::string_view name) {
    if (name == "skip") return SingularPolicy::skip;
    if (name == "min_norm") return SingularPolicy::min_norm;
    throw std::invalid_argument("unknown singular policy: " + std::string(name));
}

void BacktestSpec::validate() const {
    if (lookback_N < 2) throw std::invalid_argument("BacktestSpec: lookback_N must be >= 2");
    if (rebalance_days < 1 || horizon_days < 1 || r_max < 1)
        throw std::invalid_argument("BacktestSpec: rebalance_days, horizon_days and r_max must be positive");
    if (sample_std && horizon_days < 2)
        throw std::invalid_argument("BacktestSpec: sample std needs horizon_days >= 2");
    solver.validate();
}

std::vector<double> BacktestResult::per_date_std() const {
    std::vector<double> out;
    for (const auto& d : dates)
        if (!d.skipped) out.push_back(d.std_dev);
    return out;
}

int BacktestResult::skipped() const {
    return static_cast<int>(std::count_if(dates.begin(), dates.end(), [](const auto& d) { return d.skipped; }));
}

double portfolio_std(const Matrix& returns, const Vector& weights, bool sample) {
    if (returns.cols() != weights.size()) throw std::invalid_argument("portfolio_std: width mismatch");
    const auto rows = returns.rows();
    if (rows < (sample ? 2 : 1)) throw std::invalid_argument("portfolio_std: too few rows");
    const Vector p = returns * weights;
    const double var = (p.array() - p.mean()).square().sum() / static_cast<double>(sample ? rows - 1 : rows);
    return std::sqrt(var);
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

namespace {

// Weights for one date; fills rank/skipped/note.
Vector date_weights(const Matrix& window, const BacktestSpec& spec, BacktestDate& date) {
    const auto n = window.cols();
    if (spec.estimator == Estimator::equal_weight) return Vector::Constant(n, 1.0 / static_cast<double>(n));

    const SampleCov scm = sample_covariance(window.transpose());
    Matrix cov;
    if (spec.estimator == Estimator::scm) {
        cov = scm.matrix();
    } else if (!scm.has_positive_diagonal()) {
        // an all-zero asset column leaves nothing to fit; treat like a singular SCM
        cov = scm.matrix();
    } else {
        const int r_max = std::min({spec.r_max, spec.lookback_N - 1, static_cast<int>(n) - 1});
        if (r_max < 1) {
            date.skipped = true;
            date.note = "no admissible rank";
            return {};
        }
        const RankScan scan = select_rank(scm, spec.lookback_N, r_max, spec.solver);
        date.rank = scan.chosen;
        cov = scan.chosen_fit().covariance();
    }

    try {
        return min_variance_weights(cov);
    } catch (const std::domain_error&) {
        if (spec.singular == SingularPolicy::min_norm) {
            date.note = "singular covariance, minimum-norm weights";
            return min_norm_weights(cov);
        }
        date.skipped = true;
        date.note = "singular covariance";
        return {};
    }
}

}  // namespace

BacktestResult run_backtest(const Matrix& returns, const BacktestSpec& spec) {
    spec.validate();
    const auto T = static_cast<int>(returns.rows());
    if (returns.cols() < 1) throw std::invalid_argument("run_backtest: no assets");
    if (T < spec.lookback_N + spec.horizon_days)
        throw std::invalid_argument("run_backtest: insufficient history (need lookback_N + horizon_days rows)");
    if (!returns.allFinite()) throw std::invalid_argument("run_backtest: non-finite returns");

    BacktestResult result;
    for (int d = spec.lookback_N; d + spec.horizon_days <= T; d += spec.rebalance_days) {
        BacktestDate date;
        date.index = d;
        result.dates.push_back(date);
    }

    parallel_for(
        static_cast<int>(result.dates.size()),
        [&](int i) {
            BacktestDate& date = result.dates[static_cast<std::size_t>(i)];
            const Matrix window = returns.middleRows(date.index - spec.lookback_N, spec.lookback_N);
            date.weights = date_weights(window, spec, date);
            if (date.skipped) return;
            date.std_dev = portfolio_std(returns.middleRows(date.index, spec.horizon_days), date.weights,
                                         spec.sample_std);
        },
        spec.threads);

    const auto stds = result.per_date_std();
    result.median_std = stds.empty() ? std::nan("") : median(stds);
    return result;
}

Matrix FactorModel::covariance() const {
    Matrix c = s * s.transpose();
    c.diagonal() += sigma_sq;
    return c;
}

FactorModel synth_factor_model(int n, int r, double snr_db, std::uint64_t seed) {
    if (n < 1 || r < 0 || r >= n) throw std::invalid_argument("synth_factor_model: need 0 <= r < n");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    FactorModel model;
    model.s.resize(n, r);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) model.s(i, j) = normal(rng);
    model.sigma_sq.resize(n);
    for (int i = 0; i < n; ++i) {
        double v = 0;
        while (v == 0) v = unit(rng);
        model.sigma_sq(i) = v;
    }
    if (r > 0) {
        const double target = std::pow(10.0, snr_db / 10.0);
        model.sigma_sq *= model.s.squaredNorm() / (model.sigma_sq.sum() * target);
    }
    return model;
}

Matrix synth_factor_returns(const FactorModel& model, int T, std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("synth_factor_returns: T must be >= 1");
    const auto n = model.sigma_sq.size();
    const auto r = model.s.cols();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vector noise_sd = model.sigma_sq.array().sqrt();

    Matrix factors(T, r);
    Matrix noise(T, n);
    for (int t = 0; t < T; ++t) {
        for (Eigen::Index j = 0; j < r; ++j) factors(t, j) = normal(rng);
        for (Eigen::Index i = 0; i < n; ++i) noise(t, i) = noise_sd(i) * normal(rng);
    }
    return factors * model.s.transpose() + noise;
}

Matrix synth_factor_returns(int n, int r, double snr_db, int T, std::uint64_t seed) {
    // the draws use a stream distinct from the model's
    return synth_factor_returns(synth_factor_model(n, r, snr_db, seed), T, seed ^ 0x9e3779b97f4a7c15ULL);
}

double normalized_frobenius_error(const Matrix& estimate, const Matrix& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw std::invalid_argument("normalized_frobenius_error: shape mismatch");
    const double denom = truth.norm();
    if (denom == 0) throw std::domain_error("normalized_frobenius_error: zero reference");
    return (estimate - truth).norm() / denom;
}

}  // namespace faan

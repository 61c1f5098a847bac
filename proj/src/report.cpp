#include "faan/report.hpp"

#include <cmath>
#include <ostream>

namespace faan {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> row_major(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

// NaN is not representable in JSON
nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json fit_report(const FactorFit& fit, const SolverConfig& config) {
    nlohmann::json cfg{{"epsilon", config.epsilon},
                       {"max_iter", config.max_iter},
                       {"sigma_init", std::string(to_string(config.sigma_init))},
                       {"seed", config.seed}};
    if (config.sigma_init == SigmaInit::explicit_vector) cfg["explicit_sigma_sq"] = to_std(config.explicit_sigma_sq);
    return {{"method", std::string(to_string(fit.method))},
            {"rank", fit.rank},
            {"n", fit.dim()},
            {"sigma_sq", to_std(fit.sigma_sq)},
            {"ssT", row_major(fit.ssT)},
            {"lambda", to_std(fit.lambda)},
            {"loss_trace", fit.loss_trace},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"feasible", fit.feasible},
            {"min_sigma_sq", fit.min_sigma_sq()},
            {"eigen_selection_discrepancy", fit.eigen_selection_discrepancy},
            {"config", cfg}};
}

nlohmann::json rank_report(const RankScan& scan, long long samples) {
    nlohmann::json fits = nlohmann::json::array();
    for (std::size_t i = 0; i < scan.candidates.size(); ++i)
        fits.push_back({{"rank", scan.candidates[i]},
                        {"bic", scan.scores[i]},
                        {"iterations", scan.fits[i].iterations},
                        {"converged", scan.fits[i].converged}});
    return {{"N", samples}, {"chosen", scan.chosen}, {"candidates", fits}};
}

nlohmann::json backtest_report(const BacktestResult& result, const BacktestSpec& spec) {
    nlohmann::json dates = nlohmann::json::array();
    std::vector<int> ranks;
    for (const auto& d : result.dates) {
        nlohmann::json row{{"index", d.index}, {"skipped", d.skipped}, {"note", d.note}};
        if (spec.estimator == Estimator::faan_bic) {
            row["rank"] = d.rank;
            ranks.push_back(d.rank);
        }
        if (!d.skipped) {
            row["std"] = d.std_dev;
            row["weights"] = to_std(d.weights);
        }
        dates.push_back(std::move(row));
    }
    return {{"spec",
             {{"lookback_N", spec.lookback_N},
              {"rebalance_days", spec.rebalance_days},
              {"horizon_days", spec.horizon_days},
              {"estimator", std::string(to_string(spec.estimator))},
              {"r_max", spec.r_max},
              {"singular", std::string(to_string(spec.singular))},
              {"sample_std", spec.sample_std}}},
            {"dates", dates},
            {"per_date_std", result.per_date_std()},
            {"chosen_ranks", ranks},
            {"median_std", number_or_null(result.median_std)},
            {"skipped", result.skipped()}};
}

void write_median_csv(std::ostream& out, std::span<const MedianRow> rows) {
    const auto old = out.precision(17);
    out << "N,estimator,median_std\n";
    for (const auto& r : rows) out << r.lookback_N << ',' << to_string(r.estimator) << ',' << r.median_std << '\n';
    out.precision(old);
}

void write_rmse_csv(std::ostream& out, SweepVariable var, std::span<const RmseRow> rows) {
    const auto old = out.precision(17);
    out << to_string(var) << ",method,rmse,trials\n";
    for (const auto& r : rows) out << r.value << ',' << r.method << ',' << r.rmse << ',' << r.trials << '\n';
    out.precision(old);
}

}  // namespace faan

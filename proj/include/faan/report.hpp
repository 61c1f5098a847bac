#pragma once

// JSON and CSV writers for fit, rank-scan and backtest results.

#include "faan/covmodel.hpp"
#include "faan/doa.hpp"
#include "faan/portfolio.hpp"
#include "faan/ranksel.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>

namespace faan {

/// Keys: method, rank, sigma_sq, ssT (row-major), loss_trace, iterations,
/// converged, feasible, min_sigma_sq, eigen_selection_discrepancy, config.
nlohmann::json fit_report(const FactorFit& fit, const SolverConfig& config);

nlohmann::json rank_report(const RankScan& scan, long long samples);

/// Keys: spec, dates (index, skipped, note, rank, std, weights), per_date_std,
/// chosen_ranks, median_std, skipped.
nlohmann::json backtest_report(const BacktestResult& result, const BacktestSpec& spec);

/// Header "N,estimator,median_std" then one row per entry.
struct MedianRow {
    int lookback_N = 0;
    Estimator estimator = Estimator::faan_bic;
    double median_std = 0;
};
void write_median_csv(std::ostream& out, std::span<const MedianRow> rows);

/// Header "<N|snr_db>,method,rmse,trials".
void write_rmse_csv(std::ostream& out, SweepVariable var, std::span<const RmseRow> rows);

}  // namespace faan

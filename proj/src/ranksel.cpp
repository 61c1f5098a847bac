#include "faan/ranksel.hpp"

#include "faan/bounds.hpp"
#include "faan/parallel.hpp"
#include "faan/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace faan {

const FactorFit& RankScan::chosen_fit() const {
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i] == chosen) return fits[i];
    throw std::logic_error("RankScan: chosen rank not among candidates");
}

double bic_score(const SampleCov& scm, const FactorFit& fit, long long samples) {
    if (samples < 1) throw std::invalid_argument("bic_score: N must be >= 1");
    if (fit.dim() != scm.dim()) throw std::invalid_argument("bic_score: dimension mismatch");
    const int n = scm.dim();
    const double data_term = static_cast<double>(samples) * gaussian_loss(scm, fit.covariance());
    const double n_m = static_cast<double>(param_counts(n, fit.rank).model);
    return data_term + n_m * std::log(static_cast<double>(samples) * n);
}

RankScan select_rank(const SampleCov& scm, long long samples, int r_max, const SolverConfig& config,
                     int threads) {
    const int n = scm.dim();
    if (r_max < 1 || r_max >= n) throw std::invalid_argument("select_rank: need 1 <= r_max < n");

    RankScan scan;
    scan.candidates.resize(static_cast<std::size_t>(r_max));
    scan.scores.resize(scan.candidates.size());
    scan.fits.resize(scan.candidates.size());
    parallel_for(
        r_max,
        [&](int i) {
            const int r = i + 1;
            FactorFit f = faan_fit(FitRequest{scm, r, config, Method::faan});
            scan.candidates[static_cast<std::size_t>(i)] = r;
            scan.scores[static_cast<std::size_t>(i)] = bic_score(scm, f, samples);
            scan.fits[static_cast<std::size_t>(i)] = std::move(f);
        },
        threads);

    std::size_t best = 0;
    for (std::size_t i = 1; i < scan.scores.size(); ++i)
        if (scan.scores[i] < scan.scores[best]) best = i;
    scan.chosen = scan.candidates[best];
    return scan;
}

}  // namespace faan

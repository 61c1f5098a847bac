#pragma once

// Number-of-factors selection by the Bayesian information criterion.

#include "faan/covmodel.hpp"

#include <vector>

namespace faan {

struct RankScan {
    std::vector<int> candidates;
    std::vector<double> scores;
    std::vector<FactorFit> fits;
    int chosen = 0;

    const FactorFit& chosen_fit() const;
};

/// N * (Tr(R_hat C^{-1}) + ln|C|) + n_m ln(N n), C = ssT + Sigma, with n_m the
/// free-parameter count for the fit's rank.
double bic_score(const SampleCov& scm, const FactorFit& fit, long long samples);

/// FAAN fit for every r in [1, r_max], each started from config's Sigma_0;
/// chosen = argmin BIC, ties toward smaller r. Requires 1 <= r_max < n.
RankScan select_rank(const SampleCov& scm, long long samples, int r_max = 10,
                     const SolverConfig& config = {}, int threads = 1);

}  // namespace faan

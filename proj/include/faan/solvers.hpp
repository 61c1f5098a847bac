#pragma once

// Fitting procedures for R = SS^T + Sigma:
//
//   faan       coordinate-descent maximum likelihood (whitened eigen-step,
//              then per-coordinate positive-root noise updates)
//   fnm_o      Frobenius-norm alternating minimization, unconstrained noise step
//   fnm        same, with negative noise variances clamped to zero
//   isotropic  closed-form maximum likelihood for Sigma = sigma^2 I

#include "faan/covmodel.hpp"

#include <cmath>

namespace faan {

struct FitRequest {
    SampleCov scm;
    int rank = 1;
    SolverConfig config{};
    Method method = Method::faan;

    void validate() const;
};

FactorFit faan_fit(const FitRequest& req);
FactorFit fnmo_fit(const FitRequest& req);
FactorFit fnm_fit(const FitRequest& req);
FactorFit isotropic_ml(const SampleCov& scm, int rank);

/// Dispatches on req.method.
FactorFit fit(const FitRequest& req);

/// Positive root of s^2 - b s - c = 0, the exact minimizer of the noise
/// objective along coordinate k when c > 0.
inline double faan_sigma_root(double b, double c) {
    const double d = std::sqrt(b * b + 4.0 * c);
    // b < 0: the textbook form cancels; use the conjugate instead
    return b >= 0 ? 0.5 * (b + d) : 2.0 * c / (d - b);
}

/// -s^2 + 2 b s + 3 c: same sign as the second derivative of the noise
/// objective along coordinate k, evaluated at s.
inline double faan_sigma_curvature(double b, double c, double s) {
    return -s * s + 2.0 * b * s + 3.0 * c;
}

/// Rebuilds Sigma^{1/2} U Lambda U^T Sigma^{1/2} from a whitened-coordinate fit.
Matrix reconstruct_signal(const Matrix& u, const Vector& lambda, const Vector& sigma_sq);

}  // namespace faan

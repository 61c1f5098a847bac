#include "faan/solvers.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace faan {

void FitRequest::validate() const {
    const int n = scm.dim();
    if (rank < 1 || rank >= n)
        throw std::invalid_argument("rank must satisfy 1 <= r < n (r = " + std::to_string(rank) +
                                    ", n = " + std::to_string(n) + ")");
    config.validate();
    if (method == Method::faan || method == Method::isotropic) scm.require_positive_diagonal();
}

Matrix reconstruct_signal(const Matrix& u, const Vector& lambda, const Vector& sigma_sq) {
    const Vector sd = sigma_sq.array().sqrt();
    const Matrix scaled = sd.asDiagonal() * u;
    Matrix out = scaled * lambda.asDiagonal() * scaled.transpose();
    return 0.5 * (out + out.transpose());
}

FactorFit faan_fit(const FitRequest& req) {
    req.validate();
    const Matrix& rhat = req.scm.matrix();
    const int n = req.scm.dim();
    const int r = req.rank;
    const SolverConfig& cfg = req.config;

    Vector sd = initial_sigma_sq(req.scm, cfg).array().sqrt();
    if (!(sd.array() > 0).all()) throw std::invalid_argument("faan_fit: initial Sigma must be > 0");

    FactorFit out;
    out.method = Method::faan;
    out.rank = r;

    Matrix u;
    Vector lambda;
    double prev = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < cfg.max_iter; ++pass) {
        // (a) principal subspace of the whitened matrix
        const Vector inv_sd = sd.cwiseInverse();
        const Matrix whitened = inv_sd.asDiagonal() * rhat * inv_sd.asDiagonal();
        const SymEig eig = sym_eig(0.5 * (whitened + whitened.transpose()));
        u = eig.vectors.leftCols(r);
        lambda = (eig.values.head(r).array() - 1.0).cwiseMax(0.0);

        // (b) Gauss-Seidel sweeps over the noise standard deviations, with
        // Gamma = (I + U Lambda U^T)^{-1}, assembled in the full eigenbasis
        // so that large lambda does not cancel against the identity
        Vector g = Vector::Ones(n);
        g.head(r) = (1.0 + lambda.array()).inverse();
        const Matrix gamma = eig.vectors * g.asDiagonal() * eig.vectors.transpose();
        const Matrix weighted = rhat.cwiseProduct(gamma);

        Vector inv = sd.cwiseInverse();
        for (int sweep = 0; sweep < cfg.inner_sigma_sweeps; ++sweep) {
            for (int k = 0; k < n; ++k) {
                const double b = weighted.col(k).dot(inv) - weighted(k, k) * inv(k);
                const double c = weighted(k, k);
                const double root = faan_sigma_root(b, c);
                assert(faan_sigma_curvature(b, c, root) >= -1e-9 * (std::abs(c) + b * b));
                sd(k) = root;
                inv(k) = 1.0 / root;
            }
        }

        // loss at (U, Lambda, Sigma_new):
        //   Tr(Sigma^{-1/2} R Sigma^{-1/2} Gamma) + sum ln(1 + lambda) + ln|Sigma|
        const double loss = inv.dot(weighted * inv) + lambda.array().log1p().sum() +
                            2.0 * sd.array().log().sum();
        out.loss_trace.push_back(loss);
        if (relative_decrease(prev, loss) <= cfg.epsilon) {
            out.converged = true;
            break;
        }
        prev = loss;
    }

    out.iterations = static_cast<int>(out.loss_trace.size()) - 1;
    out.u = u;
    out.lambda = lambda;
    out.sigma_sq = sd.array().square();
    out.ssT = reconstruct_signal(u, lambda, out.sigma_sq);
    out.feasible = (out.sigma_sq.array() > 0).all();
    return out;
}

namespace {

FactorFit frobenius_fit(const FitRequest& req, bool clamp) {
    req.validate();
    const Matrix& rhat = req.scm.matrix();
    const int n = req.scm.dim();
    const int r = req.rank;
    const SolverConfig& cfg = req.config;

    Vector noise = initial_sigma_sq(req.scm, cfg);

    FactorFit out;
    out.method = clamp ? Method::fnm : Method::fnm_o;
    out.rank = r;

    SymEig eig;
    Matrix ssT = Matrix::Zero(n, n);
    double prev = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < cfg.max_iter; ++pass) {
        Matrix resid = rhat;
        resid.diagonal() -= noise;
        eig = sym_eig(resid);
        const Matrix w = eig.vectors.leftCols(r);
        ssT = w * eig.values.head(r).asDiagonal() * w.transpose();
        ssT = 0.5 * (ssT + ssT.transpose());

        noise = (rhat - ssT).diagonal();
        if (clamp) noise = noise.cwiseMax(0.0);

        const double loss = frobenius_loss(req.scm, ssT, noise);
        out.loss_trace.push_back(loss);
        if (relative_decrease(prev, loss) <= cfg.epsilon) {
            out.converged = true;
            break;
        }
        prev = loss;
    }

    out.iterations = static_cast<int>(out.loss_trace.size()) - 1;
    out.u = eig.vectors.leftCols(r);
    out.lambda = eig.values.head(r);
    out.sigma_sq = noise;
    out.ssT = ssT;

    const double scale = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
    const bool signal_psd = out.lambda.minCoeff() >= -1e-10 * scale;
    out.feasible = signal_psd && (noise.array() >= 0).all();

    // a magnitude-ordered selection would keep a different set of eigenvalues
    if (r < n) {
        const double kept = eig.values.head(r).cwiseAbs().minCoeff();
        const double dropped = eig.values.tail(n - r).cwiseAbs().maxCoeff();
        out.eigen_selection_discrepancy = dropped > kept * (1.0 + 1e-12);
    }
    return out;
}

}  // namespace

FactorFit fnmo_fit(const FitRequest& req) { return frobenius_fit(req, false); }

FactorFit fnm_fit(const FitRequest& req) { return frobenius_fit(req, true); }

FactorFit isotropic_ml(const SampleCov& scm, int rank) {
    const int n = scm.dim();
    if (rank < 1 || rank >= n) throw std::invalid_argument("isotropic_ml: rank must satisfy 1 <= r < n");
    const SymEig eig = sym_eig(scm.matrix());
    const double noise = eig.values.tail(n - rank).mean();
    if (!(noise > 0)) throw std::domain_error("isotropic_ml: sample covariance is not positive definite");

    FactorFit out;
    out.method = Method::isotropic;
    out.rank = rank;
    out.u = eig.vectors.leftCols(rank);
    out.lambda = (eig.values.head(rank).array() / noise - 1.0).cwiseMax(0.0);
    out.sigma_sq = Vector::Constant(n, noise);
    out.ssT = reconstruct_signal(out.u, out.lambda, out.sigma_sq);
    out.loss_trace.push_back(gaussian_loss(scm, out.ssT, out.sigma_sq));
    out.iterations = 0;
    out.converged = true;
    out.feasible = true;
    return out;
}

FactorFit fit(const FitRequest& req) {
    switch (req.method) {
        case Method::faan: return faan_fit(req);
        case Method::fnm: return fnm_fit(req);
        case Method::fnm_o: return fnmo_fit(req);
        case Method::isotropic: return isotropic_ml(req.scm, req.rank);
    }
    throw std::logic_error("unreachable");
}

}  // namespace faan

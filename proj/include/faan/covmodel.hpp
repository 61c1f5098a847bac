#pragma once

// Core types for the low-rank-plus-diagonal covariance model
//
//     R = S S^T + Sigma,   rank(S) = r,   Sigma diagonal,
//
// and the loss / transform primitives shared by every solver.

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace faan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric second-moment matrix. Symmetrized on construction; inputs whose
/// asymmetry exceeds 1e-8 (relative to the largest entry) are rejected.
class SampleCov {
public:
    explicit SampleCov(const Matrix& m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    bool has_positive_diagonal() const;

    /// Throws std::invalid_argument unless every diagonal entry is > 0.
    void require_positive_diagonal() const;

private:
    Matrix m_;
};

enum class Divisor { n_samples, n_minus_one };

/// (1/N) sum_t y_t y_t^T over the columns of `data` (n x N). With `center`
/// the column mean is removed first. The divisor defaults to N.
SampleCov sample_covariance(const Matrix& data, bool center = false,
                            Divisor divisor = Divisor::n_samples);

enum class SigmaInit { identity, diag_of_scm, explicit_vector, seeded_random };

std::string_view to_string(SigmaInit init);
SigmaInit sigma_init_from_string(std::string_view name);

struct SolverConfig {
    double epsilon = 1e-3;
    int max_iter = 1000;
    int inner_sigma_sweeps = 3;
    SigmaInit sigma_init = SigmaInit::diag_of_scm;
    Vector explicit_sigma_sq;  // used when sigma_init == explicit_vector
    std::uint64_t seed = 0;

    void validate() const;
};

/// Starting noise variances for a solver run.
Vector initial_sigma_sq(const SampleCov& scm, const SolverConfig& config);

enum class Method { faan, fnm, fnm_o, isotropic };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// Output of every solver.
///
/// For faan and isotropic fits, (u, lambda) is the eigendecomposition of the
/// whitened signal part Sigma^{-1/2} SS^T Sigma^{-1/2}, so that
/// ssT = Sigma^{1/2} U Lambda U^T Sigma^{1/2}. For the Frobenius methods
/// (fnm, fnm_o) no whitening is involved and (u, lambda) are the retained
/// eigenpairs of R - Sigma, i.e. ssT = U Lambda U^T; lambda may then contain
/// negative values (fnm_o).
///
/// sigma_sq holds noise variances; fnm_o may leave entries negative.
struct FactorFit {
    Method method = Method::faan;
    int rank = 0;
    Matrix u;
    Vector lambda;
    Vector sigma_sq;
    Matrix ssT;
    std::vector<double> loss_trace;
    int iterations = 0;
    bool converged = false;
    bool feasible = true;
    /// Frobenius methods only: the kept r algebraically-largest eigenvalues
    /// differ from the r largest in magnitude at the final iterate.
    bool eigen_selection_discrepancy = false;

    int dim() const { return static_cast<int>(ssT.rows()); }
    double min_sigma_sq() const { return sigma_sq.minCoeff(); }
    double final_loss() const { return loss_trace.empty() ? 0.0 : loss_trace.back(); }

    /// ssT + diag(sigma_sq).
    Matrix covariance() const;
};

/// Eigendecomposition of a symmetric matrix with descending eigenvalues,
/// index-order tie-breaking, and each eigenvector's largest-magnitude
/// component made positive (first such index on ties).
struct SymEig {
    Vector values;
    Matrix vectors;
};

SymEig sym_eig(const Matrix& m);
Vector sym_eigenvalues(const Matrix& m);

/// Tr(R_hat R^{-1}) + ln|R| with R = ssT + diag(sigma_sq). Throws
/// std::domain_error when R is not positive definite.
double gaussian_loss(const SampleCov& scm, const Matrix& ssT, const Vector& sigma_sq);
double gaussian_loss(const SampleCov& scm, const Matrix& model_cov);

/// ||R_hat - ssT - diag(sigma_sq)||_F.
double frobenius_loss(const SampleCov& scm, const Matrix& ssT, const Vector& sigma_sq);

/// Keeps the diagonal, zeroes the rest.
Matrix diag_part(const Matrix& m);
/// Zeroes the diagonal, keeps the rest.
Matrix offdiag_part(const Matrix& m);
/// Diagonal matrix with negative diagonal entries replaced by zero.
Matrix clamp_diag_nonneg(const Matrix& m);

/// Sigma^{-1/2} R_hat Sigma^{-1/2}; every variance must be > 0.
Matrix whiten(const SampleCov& scm, const Vector& sigma_sq);
Matrix whiten(const Matrix& m, const Vector& sigma_sq);

/// Relative decrease (prev - cur) / cur used by every stopping rule; when
/// cur <= 0 the denominator becomes max(|cur|, 1).
double relative_decrease(double prev, double cur);

bool is_positive_semidefinite(const Matrix& m, double rel_tol = 1e-10);

}  // namespace faan

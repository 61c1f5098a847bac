#pragma once

// Rank bounds and identifiability for R = SS^T + Sigma.

#include "faan/covmodel.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace faan {

/// Generic identifiability threshold (2n + 1 - sqrt(8n + 1)) / 2. Not rounded.
double ledermann_bound(int n);

struct ParamCounts {
    long long model = 0;        // n_m: free parameters of (S, Sigma)
    long long constraints = 0;  // n_c: distinct entries of a symmetric n x n matrix
};

/// Requires 0 <= r < n.
ParamCounts param_counts(int n, int r);

/// Number of strictly positive eigenvalues of R - [diag(R^{-1})]^{-1}; an
/// eigenvalue counts as positive above rel_tol * ||argument||_2. Throws
/// std::domain_error for a singular matrix.
int guttman_bound(const SampleCov& scm, double rel_tol = 1e-9);

/// ceil of the mean of integer bounds (averaged-statistic round-up).
int ceil_mean(std::span<const int> values);

/// sum_i a_i b_{n+1-i} for eigenvalue lists sorted in descending order;
/// a lower bound on Tr(AB) for symmetric A, B.
double ruhe_lower_bound(std::span<const double> eigs_a, std::span<const double> eigs_b);

enum class Identifiability { globally_identifiable, locally_identifiable, unidentifiable };

std::string_view to_string(Identifiability cls);

struct IdentifiabilityVerdict {
    int n = 0;
    int r = 0;
    double r_l = 0;
    long long n_m = 0;
    long long n_c = 0;
    Identifiability cls = Identifiability::unidentifiable;
};

/// Exact comparison of r against the Ledermann bound (integer arithmetic on
/// 2r versus 2n + 1 - sqrt(8n + 1)), so r = r_L is decided without rounding.
IdentifiabilityVerdict identifiability_class(int n, int r);

enum class MleExistence { exists, exists_small_sample, does_not_exist };

std::string_view to_string(MleExistence value);

/// N >= n: exists w.p. 1; r <= N < n: exists w.p. 1; N < r: unbounded below.
MleExistence mle_existence(long long samples, long long n, long long r);

/// Largest number of sources resolvable by an n-sensor array with the real
/// two-column-per-source steering model.
int resolvable_sources(int n, bool anisotropic);

/// SPD matrix whose inverse is entrywise nonnegative (minimum exact
/// low-rank-plus-diagonal rank n - 1). The inverse is
///     M = offdiag(v v^T o W) + diag(v^2) + shift I,
/// v_i ~ U(0.5, 1.5), W_ij = W_ji ~ U(1 - spread, 1 + spread), with the shift
/// putting lambda_min(M) in [0.1, 1]. Deterministic per seed.
SampleCov frisch_test_matrix(int n, std::uint64_t seed, double spread = 0.25);

/// max_k |(Sigma + SS^T)_kk - R_kk| / R_kk.
double diagonal_matching_residual(const SampleCov& scm, const FactorFit& fit);

}  // namespace faan

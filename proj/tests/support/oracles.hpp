#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's solvers.

#include "faan/covmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using faan::Matrix;
using faan::Vector;

inline std::string fixture(const std::string& name) { return std::string(FAAN_FIXTURE_DIR) + "/" + name; }

inline Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

/// A A^T / n + 0.1 I with Gaussian A.
inline Matrix random_spd(int n, std::mt19937_64& rng) {
    const Matrix a = gaussian_matrix(n, n, rng);
    Matrix m = a * a.transpose() / n;
    m.diagonal().array() += 0.1;
    return 0.5 * (m + m.transpose());
}

inline Matrix random_symmetric(int n, std::mt19937_64& rng) {
    const Matrix a = gaussian_matrix(n, n, rng);
    return 0.5 * (a + a.transpose());
}

/// Tr(R_hat C^{-1}) + ln|C| via a full eigendecomposition of C.
inline double gaussian_loss_direct(const Matrix& rhat, const Matrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    const Vector ev = es.eigenvalues();
    const Matrix inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return (rhat * inv).trace() + ev.array().log().sum();
}

/// Quasi-Newton (BFGS) with central-difference gradients and backtracking.
inline Vector bfgs_minimize(const std::function<double(const Vector&)>& f, Vector x, int max_iter = 5000,
                            double gtol = 1e-9) {
    const auto n = x.size();
    auto grad = [&](const Vector& p) {
        Vector g(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(p(i)));
            Vector a = p, b = p;
            a(i) += h;
            b(i) -= h;
            g(i) = (f(a) - f(b)) / (2 * h);
        }
        return g;
    };
    Matrix h_inv = Matrix::Identity(n, n);
    double fx = f(x);
    Vector g = grad(x);
    for (int it = 0; it < max_iter && g.norm() > gtol; ++it) {
        Vector dir = -h_inv * g;
        if (dir.dot(g) >= 0) {
            h_inv.setIdentity();
            dir = -g;
        }
        double step = 1.0;
        Vector next = x + step * dir;
        double fn = f(next);
        while (!(fn <= fx + 1e-4 * step * g.dot(dir)) && step > 1e-16) {
            step *= 0.5;
            next = x + step * dir;
            fn = f(next);
        }
        if (step <= 1e-16) break;
        const Vector g_next = grad(next);
        const Vector s = next - x;
        const Vector y = g_next - g;
        const double sy = s.dot(y);
        if (sy > 1e-14) {
            const Matrix eye = Matrix::Identity(n, n);
            h_inv = (eye - s * y.transpose() / sy) * h_inv * (eye - y * s.transpose() / sy) + s * s.transpose() / sy;
        }
        x = next;
        fx = fn;
        g = g_next;
    }
    return x;
}

/// argmin w^T R w subject to 1^T w = 1, by parametrizing the affine set with
/// an orthonormal null-space basis of 1^T and running conjugate gradients on
/// the reduced quadratic. No matrix inverse of R is formed.
inline Vector constrained_min_variance(const Matrix& r) {
    const auto n = r.rows();
    const Vector w0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::HouseholderQR<Matrix> qr(Vector::Ones(n));
    const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix z = q.rightCols(n - 1);

    const Matrix a = 2.0 * z.transpose() * r * z;
    const Vector b = -2.0 * z.transpose() * r * w0;
    Vector y = Vector::Zero(n - 1);
    Vector res = b - a * y;
    Vector p = res;
    double rs = res.squaredNorm();
    for (int it = 0; it < 10 * n && std::sqrt(rs) > 1e-15; ++it) {
        const Vector ap = a * p;
        const double alpha = rs / p.dot(ap);
        y += alpha * p;
        res -= alpha * ap;
        const double rs_next = res.squaredNorm();
        p = res + (rs_next / rs) * p;
        rs = rs_next;
    }
    return w0 + z * y;
}

/// min over permutations P of sum_i a_i b_{P(i)}.
inline double min_permuted_pairing(std::vector<double> a, std::vector<double> b) {
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[perm[i]];
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace oracle

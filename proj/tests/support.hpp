#pragma once

// Test-only oracles. Nothing here calls into the decompositions under test.

#include <cmath>
#include <vector>

#include "ctrlgrad/linalg.hpp"
#include "ctrlgrad/rng.hpp"

namespace ctrlgrad::testing {

/// G·Gᵀ·scale/n with G n×rank Gaussian: PSD with rank ≤ `rank`.
inline Matrix random_psd(Rng& rng, std::size_t n, std::size_t rank, double scale = 1.0)
{
    const Matrix g = rng.gaussian_matrix(n, rank);
    return (scale / static_cast<double>(n)) * (g * transpose(g));
}

/// Random orthogonal matrix by modified Gram–Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(Rng& rng, std::size_t n)
{
    Matrix q = rng.gaussian_matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector v = q.col(j);
        for (std::size_t k = 0; k < j; ++k) {
            const Vector qk = q.col(k);
            const double c = dot(qk, v);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] -= c * qk[i];
            }
        }
        const double nv = std::sqrt(dot(v, v));
        for (std::size_t i = 0; i < n; ++i) {
            q(i, j) = v[i] / nv;
        }
    }
    return q;
}

/// Dimension of span{vs} by Gram–Schmidt with re-orthogonalization; a vector
/// counts as new when its residual exceeds rel_tol times the largest input norm.
inline std::size_t span_dimension(const std::vector<Vector>& vs, double rel_tol)
{
    double scale = 0.0;
    for (const auto& v : vs) {
        scale = std::max(scale, std::sqrt(dot(v, v)));
    }
    if (scale == 0.0) {
        return 0;
    }
    std::vector<Vector> basis;
    for (const auto& v0 : vs) {
        Vector v = v0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                const double c = dot(q, v);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] -= c * q[i];
                }
            }
        }
        const double nv = std::sqrt(dot(v, v));
        if (nv > rel_tol * scale) {
            for (auto& x : v) {
                x /= nv;
            }
            basis.push_back(v);
        }
    }
    return basis.size();
}

/// Plain gradient descent x ← x − γ(Ax + b), written independently of descent.cpp.
inline std::vector<Vector> plain_gd(const Matrix& a, const Vector& b, const Vector& x0, double gamma, int iters)
{
    std::vector<Vector> xs{x0};
    Vector x = x0;
    const std::size_t n = x.size();
    for (int k = 0; k < iters; ++k) {
        Vector next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double g = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                g += a(i, j) * x[j];
            }
            g += b[i];
            next[i] = x[i] - gamma * g;
        }
        x = next;
        xs.push_back(x);
    }
    return xs;
}

/// Minimizes a strongly convex quadratic ½xᵀHx − rᵀx by gradient descent with
/// step 1/‖H‖_F until the gradient norm is ≤ tol.
inline Vector gd_minimize(const Matrix& h, const Vector& r, double tol, int max_iters = 2000000)
{
    const double step = 1.0 / std::sqrt(dot(Vector(h.values()), Vector(h.values())));
    Vector x(r.size());
    for (int k = 0; k < max_iters; ++k) {
        const Vector g = h * x - r;
        if (std::sqrt(dot(g, g)) <= tol) {
            break;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] -= step * g[i];
        }
    }
    return x;
}

} // namespace ctrlgrad::testing

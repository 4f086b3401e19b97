#include "ctrlgrad/quadratic.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ctrlgrad/errors.hpp"

namespace ctrlgrad {

QuadraticProblem::QuadraticProblem(Matrix a, Vector b, double c) : a_(std::move(a)), b_(std::move(b)), c_(c)
{
    if (!a_.is_square() || a_.rows() != b_.size()) {
        throw DimensionError("quadratic: A is " + std::to_string(a_.rows()) + "x" + std::to_string(a_.cols()) +
                             " but b has " + std::to_string(b_.size()) + " entries");
    }
    if (!std::isfinite(c_)) {
        throw ContractError("quadratic: c is not finite");
    }
    if (asymmetry(a_) > 1e-12 * (1.0 + max_abs(a_))) {
        throw ContractError("A not symmetric");
    }
    const double scale = spectral_norm(a_);
    if (scale > 0.0 && min_eigenvalue_sym(a_) < -1e-8 * scale) {
        throw ContractError("A not positive semidefinite");
    }
}

double eval(const QuadraticProblem& p, const Vector& x)
{
    if (x.size() != p.dim()) {
        throw DimensionError("eval: x has " + std::to_string(x.size()) + " entries, expected " +
                             std::to_string(p.dim()));
    }
    return 0.5 * dot(x, p.a() * x) + dot(p.b(), x) + p.c();
}

Vector gradient(const QuadraticProblem& p, const Vector& x)
{
    if (x.size() != p.dim()) {
        throw DimensionError("gradient: x has " + std::to_string(x.size()) + " entries, expected " +
                             std::to_string(p.dim()));
    }
    return p.a() * x + p.b();
}

QuadraticProblem from_least_squares(const Matrix& m, const Vector& y)
{
    if (m.rows() != y.size()) {
        throw DimensionError("from_least_squares: operator has " + std::to_string(m.rows()) +
                             " rows, y has " + std::to_string(y.size()) + " entries");
    }
    const double ny = norm2(y);
    return QuadraticProblem(transpose(m) * m, -transpose_times(m, y), 0.5 * ny * ny);
}

Vector solve_critical(const QuadraticProblem& p)
{
    Vector x = min_norm_least_squares(p.a(), -p.b());
    const double residual = norm2(gradient(p, x));
    if (residual > 1e-8 * (1.0 + norm2(p.b()))) {
        throw NoCriticalPointError("no critical point: b is not in the range of A (residual " +
                                   std::to_string(residual) + ")");
    }
    return x;
}

} // namespace ctrlgrad

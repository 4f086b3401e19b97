#pragma once

#include "ctrlgrad/linalg.hpp"

namespace ctrlgrad {

/// f(x) = ½⟨x, Ax⟩ + ⟨b, x⟩ + c with A symmetric positive semidefinite.
///
/// The constructor validates symmetry (‖A − Aᵀ‖_max ≤ 1e-12·(1 + ‖A‖_max))
/// and positive semidefiniteness (smallest-eigenvalue estimate from power
/// iteration ≥ −1e-8·‖A‖) and throws ContractError otherwise.
class QuadraticProblem {
public:
    QuadraticProblem(Matrix a, Vector b, double c);

    std::size_t dim() const noexcept { return b_.size(); }
    const Matrix& a() const noexcept { return a_; }
    const Vector& b() const noexcept { return b_; }
    double c() const noexcept { return c_; }

private:
    Matrix a_;
    Vector b_;
    double c_;
};

double eval(const QuadraticProblem& p, const Vector& x);

/// ∇f(x) = Ax + b
Vector gradient(const QuadraticProblem& p, const Vector& x);

/// ½‖Mx − y‖² written as a quadratic: A = MᵀM, b = −Mᵀy, c = ½‖y‖².
///
/// The constant is ½‖y‖² so that eval() equals ½‖Mx − y‖² exactly. The
/// commonly quoted expansion with c = ‖y‖² differs only by that constant.
QuadraticProblem from_least_squares(const Matrix& m, const Vector& y);

/// Minimum-norm solution of Ax = −b. Throws NoCriticalPointError when
/// ‖Ax̂ + b‖ > 1e-8·(1 + ‖b‖).
Vector solve_critical(const QuadraticProblem& p);

} // namespace ctrlgrad

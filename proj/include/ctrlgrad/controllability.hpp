#pragma once

#include <cstdint>

#include "ctrlgrad/quadratic.hpp"

namespace ctrlgrad {

/// Controlled gradient flow ẋ = −Ax + Bu − b of a quadratic problem.
class ControlSystem {
public:
    ControlSystem(QuadraticProblem problem, Matrix b_in);

    const QuadraticProblem& problem() const noexcept { return problem_; }
    /// Hessian A of the underlying quadratic.
    const Matrix& a() const noexcept { return problem_.a(); }
    /// Input matrix B (n×m).
    const Matrix& input() const noexcept { return input_; }
    /// Drift vector b.
    const Vector& drift() const noexcept { return problem_.b(); }

    std::size_t state_dim() const noexcept { return problem_.dim(); }
    std::size_t control_dim() const noexcept { return input_.cols(); }

private:
    QuadraticProblem problem_;
    Matrix input_;
};

struct ControllabilityReport {
    Matrix kalman;
    std::size_t rank = 0;
    bool controllable = false;
    double tol_used = 0.0;
};

/// [B | (−A)B | (−A)²B | … | (−A)^{n−1}B], each block obtained from the
/// previous one by one multiplication with −A.
Matrix kalman_matrix(const ControlSystem& sys);

/// Kalman rank test; tol_rel ≤ 0 selects default_rank_tol of the Kalman matrix.
ControllabilityReport is_controllable(const ControlSystem& sys, double tol_rel = 0.0);

/// Newton-flow controllability reduces to rank(B) = n.
bool newton_controllable(const Matrix& b_in);

struct GaussianRankResult {
    std::size_t rank = 0;
    bool lower_ok = false;
    bool upper_ok = false;
};

/// Draws A = (1/m)GᵀG (G m×n) and B (n×d) from a standard Gaussian stream
/// (G first, then B, both row-major) and checks d ≤ rank(𝒞) ≤ min(n, n·d).
/// With zero_input the draw of B is replaced by the zero matrix.
GaussianRankResult gaussian_rank_check(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed,
                                       bool zero_input = false);

} // namespace ctrlgrad

#include "ctrlgrad/controllability.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ctrlgrad/errors.hpp"
#include "ctrlgrad/rng.hpp"

namespace ctrlgrad {

ControlSystem::ControlSystem(QuadraticProblem problem, Matrix b_in)
    : problem_(std::move(problem)), input_(std::move(b_in))
{
    if (input_.rows() != problem_.dim()) {
        throw DimensionError("control system: B has " + std::to_string(input_.rows()) + " rows, expected " +
                             std::to_string(problem_.dim()));
    }
}

Matrix kalman_matrix(const ControlSystem& sys)
{
    const std::size_t n = sys.state_dim();
    const std::size_t m = sys.control_dim();
    const Matrix neg_a = -1.0 * sys.a();
    Matrix out(n, n * m);
    Matrix block = sys.input();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            block = neg_a * block;
        }
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                out(r, i * m + c) = block(r, c);
            }
        }
    }
    return out;
}

ControllabilityReport is_controllable(const ControlSystem& sys, double tol_rel)
{
    ControllabilityReport report;
    report.kalman = kalman_matrix(sys);
    report.tol_used = tol_rel > 0.0 ? tol_rel : default_rank_tol(report.kalman.rows(), report.kalman.cols());
    report.rank = numerical_rank(report.kalman, report.tol_used);
    report.controllable = report.rank == sys.state_dim();
    return report;
}

bool newton_controllable(const Matrix& b_in)
{
    return numerical_rank(b_in, default_rank_tol(b_in.rows(), b_in.cols())) == b_in.rows();
}

GaussianRankResult gaussian_rank_check(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed,
                                       bool zero_input)
{
    if (n == 0 || m == 0 || d == 0) {
        throw InvalidParameterError("gaussian_rank_check: n, m, d must be positive");
    }
    Rng rng(seed);
    const Matrix g = rng.gaussian_matrix(m, n);
    Matrix hessian = (1.0 / static_cast<double>(m)) * (transpose(g) * g);
    Matrix b_in = zero_input ? Matrix(n, d) : rng.gaussian_matrix(n, d);

    const ControlSystem sys(QuadraticProblem(std::move(hessian), Vector(n), 0.0), std::move(b_in));
    const ControllabilityReport report = is_controllable(sys);
    GaussianRankResult out;
    out.rank = report.rank;
    out.lower_ok = report.rank >= d;
    out.upper_ok = report.rank <= std::min(n, n * d);
    return out;
}

} // namespace ctrlgrad

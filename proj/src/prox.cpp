#include "ctrlgrad/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctrlgrad/errors.hpp"

namespace ctrlgrad {

namespace {

void check_gamma(double gamma, const char* op)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidParameterError(std::string(op) + ": gamma must be positive");
    }
}

// z + γBu − γb
Vector shifted_point(const Matrix& input, const Vector& drift, const Vector& z, const Vector& u, double gamma)
{
    if (z.size() != drift.size() || input.rows() != drift.size() || u.size() != input.cols()) {
        throw DimensionError("prox: dimension mismatch");
    }
    Vector rhs = z;
    if (input.cols() > 0) {
        const Vector bu = input * u;
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            rhs[i] += gamma * bu[i];
        }
    }
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        rhs[i] -= gamma * drift[i];
    }
    return rhs;
}

} // namespace

Vector controlled_prox(const ProxQuery& q)
{
    check_gamma(q.gamma, "controlled_prox");
    return solve_shifted_spd(q.problem.a(), q.gamma, shifted_point(q.input, q.problem.b(), q.z, q.u, q.gamma));
}

Vector resolvent_step(const ControlSystem& sys, const Vector& xk, const Vector& uk, double gamma)
{
    check_gamma(gamma, "resolvent_step");
    return solve_shifted_spd(sys.a(), gamma, shifted_point(sys.input(), sys.drift(), xk, uk, gamma));
}

ProxResolventComparison prox_resolvent_equivalence(const ProxQuery& q)
{
    ProxResolventComparison out;
    out.prox = controlled_prox(q);
    out.resolvent = resolvent_step(ControlSystem(q.problem, q.input), q.z, q.u, q.gamma);
    out.max_abs_diff = max_abs(out.prox - out.resolvent);
    return out;
}

Vector prox_objective_gradient(const ProxQuery& q, const Vector& x)
{
    check_gamma(q.gamma, "prox_objective_gradient");
    Vector g = gradient(q.problem, x);
    const Vector bu = q.input.cols() > 0 ? q.input * q.u : Vector(x.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += (x[i] - q.z[i]) / q.gamma - bu[i];
    }
    return g;
}

} // namespace ctrlgrad

#pragma once

#include "ctrlgrad/controllability.hpp"

namespace ctrlgrad {

struct ProxQuery {
    QuadraticProblem problem;
    Matrix input;
    Vector u;
    double gamma = 1.0;
    Vector z;
};

/// argmin_x f(x) + ‖x − z‖²/(2γ) − ⟨Bu, x⟩, i.e. the solution of
/// (I + γA)x = z + γBu − γb. The objective is strongly convex for γ > 0.
Vector controlled_prox(const ProxQuery& q);

/// Implicit Euler step of the controlled flow: (I + γA)x = x_k + γBu_k − γb.
Vector resolvent_step(const ControlSystem& sys, const Vector& xk, const Vector& uk, double gamma);

struct ProxResolventComparison {
    Vector prox;
    Vector resolvent;
    double max_abs_diff = 0.0;
};

/// Evaluates the prox at z and the resolvent step from x_k = z, and their gap.
ProxResolventComparison prox_resolvent_equivalence(const ProxQuery& q);

/// ∇ of the prox objective at x: Ax + b + (x − z)/γ − Bu.
Vector prox_objective_gradient(const ProxQuery& q, const Vector& x);

} // namespace ctrlgrad

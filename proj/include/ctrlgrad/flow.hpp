#pragma once

#include <variant>
#include <vector>

#include "ctrlgrad/controllability.hpp"

namespace ctrlgrad {

namespace signal {

struct Zero {};

struct Constant {
    Vector u;
};

/// u(t) = K·x(t)
struct StateFeedback {
    Matrix gain;
};

/// values[i] is active on [times[i], times[i+1]); the last value stays active
/// afterwards and values[0] also covers t < times[0].
struct PiecewiseConstant {
    std::vector<double> times;
    std::vector<Vector> values;
};

/// Minimum-energy steering law u(t) = Bᵀe^{−Aᵀ(t_final − t)}·λ.
struct Steering {
    Matrix input_t;
    Matrix a_t;
    Vector multiplier;
    double t_final = 0.0;
};

} // namespace signal

/// Open- or closed-loop input u(t, x) for the controlled flow.
class ControlSignal {
public:
    using Kind = std::variant<signal::Zero, signal::Constant, signal::StateFeedback, signal::PiecewiseConstant,
                              signal::Steering>;

    ControlSignal() = default;
    /// Validates piecewise breakpoints (strictly increasing, one value each).
    ControlSignal(Kind kind);

    const Kind& kind() const noexcept { return kind_; }

    /// u at time t and state x; `control_dim` is used for the zero signal.
    /// With left_limit, piecewise signals return the value active just before t.
    Vector value(double t, const Vector& x, std::size_t control_dim, bool left_limit = false) const;

    /// Throws DimensionError unless every stored vector/matrix matches (n, m).
    void check_dims(std::size_t n, std::size_t m) const;

private:
    Kind kind_ = signal::Zero{};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> controls;
};

/// Fixed-step classic RK4 on ẋ = −Ax + B·u(t, x) − b.
Trajectory integrate(const ControlSystem& sys, const ControlSignal& sig, const Vector& x0, double t0, double t1,
                     int steps);

/// Variation-of-constants solution x(t) = e^{−A(t−t0)}x0 + ∫ e^{−A(t−s)}(Bu(s) − b) ds,
/// exact per constant piece through an augmented matrix exponential.
/// Accepts zero, constant and piecewise-constant signals.
Vector closed_form_state(const ControlSystem& sys, const ControlSignal& sig, const Vector& x0, double t0,
                         double t);

/// W(T) = ∫_0^T e^{−As} B Bᵀ e^{−Aᵀs} ds by composite Simpson with
/// `quad_nodes` subintervals (rounded up to even), then symmetrized.
Matrix gramian(const ControlSystem& sys, double horizon, int quad_nodes);

struct SteeringOptions {
    int quad_nodes = 2000;
    double max_condition = 1e12;
};

/// Minimum-energy open-loop control driving x0 at t0 to xd at t0 + horizon.
/// Throws SteeringInfeasibleError for uncontrollable systems and
/// IllConditionedGramianError when cond(W) exceeds options.max_condition.
ControlSignal steering_control(const ControlSystem& sys, const Vector& x0, const Vector& xd, double horizon,
                               double t0 = 0.0, const SteeringOptions& options = {});

/// d/dt f(x_t) = −‖Ax + b‖² + ⟨Ax + b, Bu⟩
double value_derivative(const ControlSystem& sys, const Vector& x, const Vector& u);

} // namespace ctrlgrad

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ctrlgrad/controllability.hpp"

namespace ctrlgrad {

/// How the control enters the explicit step.
///   direct: x_{k+1} = x_k − γ(Ax_k + b) + Bu_k
///   euler: x_{k+1} = x_k − γ(Ax_k + b) + γBu_k   (consistent discretization of the flow)
enum class Coupling { direct, euler };

struct DescentConfig {
    double gamma = 0.0;
    int max_iters = 1000;
    /// Stop once ‖∇f(x_k)‖ ≤ stop_tol; 0 runs all iterations.
    double stop_tol = 0.0;
    Coupling coupling = Coupling::euler;
};

namespace policy {

struct Zero {};

struct Constant {
    Vector u;
};

/// u_k = K·x_k
struct StateFeedback {
    Matrix gain;
};

/// u_k = K·(Ax_k + b). Every critical point of f is a fixed point for any K.
struct GradientFeedback {
    Matrix gain;
};

/// u_k = schedule[k]
struct Schedule {
    std::vector<Vector> controls;
};

} // namespace policy

using ControlPolicy =
    std::variant<policy::Zero, policy::Constant, policy::StateFeedback, policy::GradientFeedback, policy::Schedule>;

struct IterateMetrics {
    double f_value = 0.0;
    double grad_norm = 0.0;
    std::optional<double> dist_to_ref;
    double control_norm = 0.0;
};

struct RunRecord {
    std::vector<IterateMetrics> history; ///< one entry per k = 0..iterations
    Vector final_state;
    int iterations = 0;
    bool converged = false;
};

Vector descent_step(const ControlSystem& sys, const Vector& x, const Vector& u, const DescentConfig& cfg);

RunRecord run_descent(const ControlSystem& sys, const ControlPolicy& pol, const Vector& x0,
                      const DescentConfig& cfg, const std::optional<Vector>& ref = std::nullopt);

/// K = B⁺A, the Frobenius-norm minimizer of ‖A − BK‖.
Matrix design_feedback(const ControlSystem& sys);

enum class FeedbackKind { state, gradient };

struct RateCertificate {
    /// ‖A − BK‖
    double tau = 0.0;
    /// Spectral norm of the error-propagation matrix of the chosen scheme.
    double contraction = 0.0;
    /// Fixed point of the closed loop (min-norm); empty when none exists.
    std::optional<Vector> fixed_point;
    bool preserves_argmin = false;
};

/// Error recursion e_{k+1} = M e_k with
///   state / euler:    M = I − γ(A − BK)
///   state / direct:   M = I − γA + BK
///   gradient / euler: M = I − γ(I − BK)A
///   gradient / direct: M = I − (γI − BK)A
RateCertificate rate_certificate(const ControlSystem& sys, const Matrix& gain, double gamma,
                                 FeedbackKind kind = FeedbackKind::state, Coupling coupling = Coupling::euler);

struct RateBound {
    std::vector<double> values;
    /// 1 − γτ ≤ 0: the bound is degenerate (zero) or sign-alternating.
    bool degenerate_base = false;
};

/// (1 − γτ)^k·dist0 for k = 0..k_max, unclamped.
RateBound rate_bound_curve(double tau, double gamma, double dist0, int k_max);

/// 1/(2L) with L = ‖A‖; the default step when the caller gives none.
double default_step(const QuadraticProblem& p);

} // namespace ctrlgrad

#include "ctrlgrad/descent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctrlgrad/errors.hpp"

namespace ctrlgrad {

namespace {

template<class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_policy(const ControlPolicy& pol, std::size_t n, std::size_t m)
{
    auto gain_ok = [&](const Matrix& k) {
        if (k.rows() != m || k.cols() != n) {
            throw DimensionError("policy gain must be " + std::to_string(m) + "x" + std::to_string(n) + ", got " +
                                 std::to_string(k.rows()) + "x" + std::to_string(k.cols()));
        }
    };
    std::visit(overloaded{
                   [](const policy::Zero&) {},
                   [&](const policy::Constant& c) {
                       if (c.u.size() != m) {
                           throw DimensionError("constant policy: control length mismatch");
                       }
                   },
                   [&](const policy::StateFeedback& s) { gain_ok(s.gain); },
                   [&](const policy::GradientFeedback& g) { gain_ok(g.gain); },
                   [&](const policy::Schedule& s) {
                       for (const auto& u : s.controls) {
                           if (u.size() != m) {
                               throw DimensionError("schedule: control length mismatch");
                           }
                       }
                   },
               },
               pol);
}

// Empty optional means "no injection" (zero control).
std::optional<Vector> policy_control(const ControlPolicy& pol, int k, const Vector& x, const Vector& grad)
{
    return std::visit(overloaded{
                          [](const policy::Zero&) -> std::optional<Vector> { return std::nullopt; },
                          [](const policy::Constant& c) -> std::optional<Vector> { return c.u; },
                          [&](const policy::StateFeedback& s) -> std::optional<Vector> { return s.gain * x; },
                          [&](const policy::GradientFeedback& g) -> std::optional<Vector> {
                              return g.gain * grad;
                          },
                          [&](const policy::Schedule& s) -> std::optional<Vector> {
                              if (static_cast<std::size_t>(k) >= s.controls.size()) {
                                  throw ScheduleExhaustedError("schedule exhausted at iteration " +
                                                               std::to_string(k) + " (length " +
                                                               std::to_string(s.controls.size()) + ")");
                              }
                              return s.controls[k];
                          },
                      },
                      pol);
}

// x − γ·grad (+ scale·Bu when a control is present).
Vector step_from_gradient(const ControlSystem& sys, const Vector& x, const Vector& grad,
                          const std::optional<Vector>& u, const DescentConfig& cfg)
{
    Vector next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        next[i] = x[i] - cfg.gamma * grad[i];
    }
    if (u && sys.control_dim() > 0) {
        const Vector bu = sys.input() * *u;
        const double scale = cfg.coupling == Coupling::euler ? cfg.gamma : 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            next[i] += scale * bu[i];
        }
    }
    return next;
}

void check_config(const DescentConfig& cfg)
{
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) {
        throw InvalidParameterError("descent: gamma must be positive");
    }
    if (cfg.max_iters < 1) {
        throw InvalidParameterError("descent: max_iters must be >= 1");
    }
}

} // namespace

Vector descent_step(const ControlSystem& sys, const Vector& x, const Vector& u, const DescentConfig& cfg)
{
    check_config(cfg);
    if (x.size() != sys.state_dim() || u.size() != sys.control_dim()) {
        throw DimensionError("descent_step: dimension mismatch");
    }
    return step_from_gradient(sys, x, gradient(sys.problem(), x), u, cfg);
}

RunRecord run_descent(const ControlSystem& sys, const ControlPolicy& pol, const Vector& x0,
                      const DescentConfig& cfg, const std::optional<Vector>& ref)
{
    check_config(cfg);
    const std::size_t n = sys.state_dim();
    if (x0.size() != n) {
        throw DimensionError("run_descent: x0 length mismatch");
    }
    if (ref && ref->size() != n) {
        throw DimensionError("run_descent: reference length mismatch");
    }
    check_policy(pol, n, sys.control_dim());

    RunRecord rec;
    rec.history.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
    Vector x = x0;
    for (int k = 0;; ++k) {
        const Vector grad = gradient(sys.problem(), x);
        IterateMetrics m;
        m.f_value = eval(sys.problem(), x);
        m.grad_norm = norm2(grad);
        if (ref) {
            m.dist_to_ref = norm2(x - *ref);
        }

        const bool done = (cfg.stop_tol > 0.0 && m.grad_norm <= cfg.stop_tol) || k == cfg.max_iters;
        if (done) {
            // Terminal record: report the control the policy would apply, when defined.
            const auto* sched = std::get_if<policy::Schedule>(&pol);
            if (!sched || static_cast<std::size_t>(k) < sched->controls.size()) {
                if (auto u = policy_control(pol, k, x, grad)) {
                    m.control_norm = norm2(*u);
                }
            }
            rec.history.push_back(m);
            rec.converged = m.grad_norm <= cfg.stop_tol;
            rec.iterations = k;
            break;
        }

        const std::optional<Vector> u = policy_control(pol, k, x, grad);
        if (u) {
            m.control_norm = norm2(*u);
        }
        rec.history.push_back(m);
        x = step_from_gradient(sys, x, grad, u, cfg);
    }
    rec.final_state = std::move(x);
    return rec;
}

Matrix design_feedback(const ControlSystem& sys)
{
    const Matrix& b_in = sys.input();
    return pseudo_inverse(b_in, default_rank_tol(b_in.rows(), b_in.cols())) * sys.a();
}

RateCertificate rate_certificate(const ControlSystem& sys, const Matrix& gain, double gamma, FeedbackKind kind,
                                 Coupling coupling)
{
    if (!(gamma > 0.0)) {
        throw InvalidParameterError("rate_certificate: gamma must be positive");
    }
    const std::size_t n = sys.state_dim();
    if (gain.rows() != sys.control_dim() || gain.cols() != n) {
        throw DimensionError("rate_certificate: gain shape mismatch");
    }
    const Matrix& a = sys.a();
    const Matrix bk = sys.input() * gain;
    const Matrix id = Matrix::identity(n);

    RateCertificate cert;
    cert.tau = spectral_norm(a - bk);

    Matrix iteration;
    if (kind == FeedbackKind::state) {
        iteration = coupling == Coupling::euler ? id - gamma * (a - bk) : id - gamma * a + bk;
    } else {
        iteration = coupling == Coupling::euler ? id - gamma * ((id - bk) * a) : id - (gamma * id - bk) * a;
    }
    cert.contraction = spectral_norm(iteration);

    const double b_norm = norm2(sys.drift());
    if (kind == FeedbackKind::gradient) {
        try {
            cert.fixed_point = solve_critical(sys.problem());
            cert.preserves_argmin = true;
        } catch (const NoCriticalPointError&) {
            cert.preserves_argmin = false;
        }
        return cert;
    }

    // Fixed point of the closed loop: (A − BK)x = −b (euler) or (γA − BK)x = −γb (direct).
    const Matrix loop = coupling == Coupling::euler ? a - bk : gamma * a - bk;
    const Vector rhs = coupling == Coupling::euler ? -sys.drift() : -gamma * sys.drift();
    Vector xf = min_norm_least_squares(loop, rhs);
    if (norm2(loop * xf - rhs) > 1e-8 * (1.0 + norm2(rhs))) {
        return cert;
    }
    cert.preserves_argmin = norm2(bk * xf) <= 1e-8 * (1.0 + b_norm);
    cert.fixed_point = std::move(xf);
    return cert;
}

RateBound rate_bound_curve(double tau, double gamma, double dist0, int k_max)
{
    if (!(dist0 >= 0.0)) {
        throw InvalidParameterError("rate_bound_curve: dist0 must be non-negative");
    }
    RateBound out;
    const double base = 1.0 - gamma * tau;
    out.degenerate_base = base <= 0.0;
    out.values.reserve(static_cast<std::size_t>(std::max(k_max, 0)) + 1);
    double v = dist0;
    for (int k = 0; k <= k_max; ++k) {
        out.values.push_back(v);
        v *= base;
    }
    return out;
}

double default_step(const QuadraticProblem& p)
{
    const double l = spectral_norm(p.a());
    return l > 0.0 ? 1.0 / (2.0 * l) : 1.0;
}

} // namespace ctrlgrad

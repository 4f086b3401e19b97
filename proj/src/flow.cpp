#include "ctrlgrad/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ctrlgrad/errors.hpp"

namespace ctrlgrad {

namespace {

template<class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vector drift_field(const ControlSystem& sys, const Vector& x, const Vector& u)
{
    Vector dx = -(sys.a() * x) - sys.drift();
    if (sys.control_dim() > 0) {
        dx = dx + sys.input() * u;
    }
    return dx;
}

Vector axpy(double alpha, const Vector& x, const Vector& y)
{
    Vector out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += alpha * x[i];
    }
    return out;
}

// Largest eigenvalue of W⁻¹ by power iteration on Cholesky solves.
double max_inverse_eigenvalue(const Matrix& chol)
{
    const std::size_t n = chol.rows();
    Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double estimate = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Vector w = cholesky_solve(chol, v);
        const double rq = dot(v, w);
        const double nw = norm2(w);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = w[i] / nw;
        }
        if (it > 0 && std::abs(rq - estimate) <= 1e-12 * std::abs(rq)) {
            return rq;
        }
        estimate = rq;
    }
    return estimate;
}

} // namespace

ControlSignal::ControlSignal(Kind kind) : kind_(std::move(kind))
{
    if (const auto* pw = std::get_if<signal::PiecewiseConstant>(&kind_)) {
        if (pw->times.empty() || pw->times.size() != pw->values.size()) {
            throw DimensionError("piecewise signal: need one value per breakpoint");
        }
        for (std::size_t i = 1; i < pw->times.size(); ++i) {
            if (!(pw->times[i] > pw->times[i - 1])) {
                throw InvalidParameterError("piecewise signal: breakpoints must be strictly increasing");
            }
        }
    }
}

Vector ControlSignal::value(double t, const Vector& x, std::size_t control_dim, bool left_limit) const
{
    return std::visit(
        overloaded{
            [&](const signal::Zero&) { return Vector(control_dim); },
            [&](const signal::Constant& c) { return c.u; },
            [&](const signal::StateFeedback& k) { return k.gain * x; },
            [&](const signal::PiecewiseConstant& pw) {
                const auto it = left_limit ? std::lower_bound(pw.times.begin(), pw.times.end(), t)
                                           : std::upper_bound(pw.times.begin(), pw.times.end(), t);
                const auto idx = it == pw.times.begin() ? 0 : static_cast<std::size_t>(it - pw.times.begin()) - 1;
                return pw.values[idx];
            },
            [&](const signal::Steering& s) {
                return s.input_t * (mat_exp(s.a_t, -(s.t_final - t)) * s.multiplier);
            },
        },
        kind_);
}

void ControlSignal::check_dims(std::size_t n, std::size_t m) const
{
    auto fail = [](const std::string& what) { throw DimensionError("control signal: " + what); };
    std::visit(overloaded{
                   [&](const signal::Zero&) {},
                   [&](const signal::Constant& c) {
                       if (c.u.size() != m) {
                           fail("constant has " + std::to_string(c.u.size()) + " entries, expected " +
                                std::to_string(m));
                       }
                   },
                   [&](const signal::StateFeedback& k) {
                       if (k.gain.rows() != m || k.gain.cols() != n) {
                           fail("feedback gain must be " + std::to_string(m) + "x" + std::to_string(n));
                       }
                   },
                   [&](const signal::PiecewiseConstant& pw) {
                       for (const auto& v : pw.values) {
                           if (v.size() != m) {
                               fail("piecewise value has wrong length");
                           }
                       }
                   },
                   [&](const signal::Steering& s) {
                       if (s.input_t.rows() != m || s.input_t.cols() != n || s.multiplier.size() != n) {
                           fail("steering data does not match the system");
                       }
                   },
               },
               kind_);
}

Trajectory integrate(const ControlSystem& sys, const ControlSignal& sig, const Vector& x0, double t0, double t1,
                     int steps)
{
    const std::size_t n = sys.state_dim();
    const std::size_t m = sys.control_dim();
    if (x0.size() != n) {
        throw DimensionError("integrate: x0 has " + std::to_string(x0.size()) + " entries, expected " +
                             std::to_string(n));
    }
    if (!(t1 > t0)) {
        throw InvalidParameterError("integrate: require t1 > t0");
    }
    if (steps < 1) {
        throw InvalidParameterError("integrate: steps must be >= 1");
    }
    sig.check_dims(n, m);

    const double h = (t1 - t0) / steps;
    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.controls.reserve(steps + 1);

    Vector x = x0;
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * h;
        const double t_end = k + 1 == steps ? t1 : t0 + (k + 1) * h;
        const double t_mid = t + 0.5 * (t_end - t);
        const double hk = t_end - t;

        const Vector u1 = sig.value(t, x, m);
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.controls.push_back(u1);

        const Vector k1 = drift_field(sys, x, u1);
        const Vector x2 = axpy(0.5 * hk, k1, x);
        const Vector k2 = drift_field(sys, x2, sig.value(t_mid, x2, m));
        const Vector x3 = axpy(0.5 * hk, k2, x);
        const Vector k3 = drift_field(sys, x3, sig.value(t_mid, x3, m));
        const Vector x4 = axpy(hk, k3, x);
        const Vector k4 = drift_field(sys, x4, sig.value(t_end, x4, m, true));
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += hk / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    traj.times.push_back(t1);
    traj.states.push_back(x);
    traj.controls.push_back(sig.value(t1, x, m));
    return traj;
}

Vector closed_form_state(const ControlSystem& sys, const ControlSignal& sig, const Vector& x0, double t0,
                         double t)
{
    const std::size_t n = sys.state_dim();
    const std::size_t m = sys.control_dim();
    if (x0.size() != n) {
        throw DimensionError("closed_form_state: x0 length mismatch");
    }
    if (!(t >= t0)) {
        throw InvalidParameterError("closed_form_state: t lies before t0");
    }
    sig.check_dims(n, m);

    std::vector<double> cuts{t0};
    if (const auto* pw = std::get_if<signal::PiecewiseConstant>(&sig.kind())) {
        for (double s : pw->times) {
            if (s > t0 && s < t) {
                cuts.push_back(s);
            }
        }
    } else if (std::holds_alternative<signal::StateFeedback>(sig.kind()) ||
               std::holds_alternative<signal::Steering>(sig.kind())) {
        throw InvalidParameterError("closed_form_state: only zero, constant and piecewise-constant signals");
    }
    cuts.push_back(t);

    // exp(h·[[−A, v], [0, 0]]) = [[e^{−Ah}, ∫_0^h e^{−Aσ}dσ·v], [0, 1]]
    Vector x = x0;
    Matrix aug(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug(i, j) = -sys.a()(i, j);
        }
    }
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double h = cuts[k + 1] - cuts[k];
        if (h <= 0.0) {
            continue;
        }
        const Vector u = sig.value(cuts[k], x, m);
        Vector forcing = -1.0 * sys.drift();
        if (m > 0) {
            forcing = forcing + sys.input() * u;
        }
        for (std::size_t i = 0; i < n; ++i) {
            aug(i, n) = forcing[i];
        }
        const Matrix e = mat_exp(aug, h);
        Vector next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = e(i, n);
            for (std::size_t j = 0; j < n; ++j) {
                s += e(i, j) * x[j];
            }
            next[i] = s;
        }
        x = std::move(next);
    }
    return x;
}

Matrix gramian(const ControlSystem& sys, double horizon, int quad_nodes)
{
    if (!(horizon > 0.0)) {
        throw InvalidParameterError("gramian: horizon must be positive");
    }
    if (quad_nodes < 2) {
        quad_nodes = 2;
    }
    if (quad_nodes % 2 != 0) {
        ++quad_nodes;
    }
    const std::size_t n = sys.state_dim();
    const double h = horizon / quad_nodes;
    const Matrix step = mat_exp(sys.a(), -h);

    Matrix w(n, n);
    Matrix kernel = Matrix::identity(n);
    for (int k = 0; k <= quad_nodes; ++k) {
        if (k > 0) {
            kernel = step * kernel;
        }
        const double weight = (k == 0 || k == quad_nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        const Matrix eb = kernel * sys.input();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < eb.cols(); ++c) {
                    s += eb(i, c) * eb(j, c);
                }
                w(i, j) += weight * s;
            }
        }
    }
    w = (h / 3.0) * w;
    return 0.5 * (w + transpose(w));
}

ControlSignal steering_control(const ControlSystem& sys, const Vector& x0, const Vector& xd, double horizon,
                               double t0, const SteeringOptions& options)
{
    const std::size_t n = sys.state_dim();
    if (x0.size() != n || xd.size() != n) {
        throw DimensionError("steering_control: endpoint length mismatch");
    }
    if (!(horizon > 0.0)) {
        throw InvalidParameterError("steering_control: horizon must be positive");
    }
    const ControllabilityReport report = is_controllable(sys);
    if (!report.controllable) {
        throw SteeringInfeasibleError("steering infeasible: Kalman rank " + std::to_string(report.rank) + " < n = " +
                                      std::to_string(n));
    }

    const Matrix w = gramian(sys, horizon, options.quad_nodes);
    Matrix chol;
    try {
        chol = cholesky(w);
    } catch (const ContractError&) {
        throw IllConditionedGramianError("ill-conditioned gramian: not numerically positive definite");
    }
    const double condition = max_eigenvalue_sym(w) * max_inverse_eigenvalue(chol);
    if (!(condition <= options.max_condition)) {
        throw IllConditionedGramianError("ill-conditioned gramian: condition estimate " + std::to_string(condition));
    }

    const Vector free_end = closed_form_state(sys, ControlSignal{}, x0, t0, t0 + horizon);
    return ControlSignal(signal::Steering{transpose(sys.input()), transpose(sys.a()),
                                          cholesky_solve(chol, xd - free_end), t0 + horizon});
}

double value_derivative(const ControlSystem& sys, const Vector& x, const Vector& u)
{
    if (x.size() != sys.state_dim() || u.size() != sys.control_dim()) {
        throw DimensionError("value_derivative: dimension mismatch");
    }
    const Vector g = gradient(sys.problem(), x);
    const double ng = norm2(g);
    if (sys.control_dim() == 0) {
        return -ng * ng;
    }
    return -ng * ng + dot(g, sys.input() * u);
}

} // namespace ctrlgrad

#include <cmath>

#include "ctrlgrad/descent.hpp"
#include "ctrlgrad/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctrlgrad;
using ctrlgrad::testing::plain_gd;
using ctrlgrad::testing::random_psd;

namespace {

ControlSystem make_system(Matrix a, Vector b, Matrix b_in)
{
    return ControlSystem(QuadraticProblem(std::move(a), std::move(b), 0.0), std::move(b_in));
}

DescentConfig config(double gamma, int iters, Coupling coupling = Coupling::euler)
{
    DescentConfig cfg;
    cfg.gamma = gamma;
    cfg.max_iters = iters;
    cfg.coupling = coupling;
    return cfg;
}

} // namespace

TEST_SUITE("descent") {

TEST_CASE("descent_step examples")
{
    const ControlSystem sys = make_system(Matrix::identity(2), Vector(2), Matrix::identity(2));
    CHECK(descent_step(sys, Vector{2.0, -2.0}, Vector(2), config(0.5, 1)) == Vector{1.0, -1.0});
    CHECK(descent_step(sys, Vector{2.0, -2.0}, Vector{1.0, 1.0}, config(0.5, 1, Coupling::direct)) ==
          Vector{2.0, 0.0});
    CHECK(descent_step(sys, Vector{2.0, -2.0}, Vector{1.0, 1.0}, config(0.5, 1, Coupling::euler)) ==
          Vector{1.5, -0.5});
    CHECK_THROWS_AS(descent_step(sys, Vector(2), Vector(2), config(0.0, 1)), InvalidParameterError);
    CHECK_THROWS_AS(descent_step(sys, Vector(2), Vector(3), config(0.5, 1)), DimensionError);
}

TEST_CASE("euler coupling follows its recursion")
{
    Rng rng(501);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const std::size_t m = 1 + rng.below(3);
        const ControlSystem sys =
            make_system(random_psd(rng, n, n), rng.gaussian_vector(n), rng.gaussian_matrix(n, m));
        const Vector x = rng.gaussian_vector(n);
        const Vector u = rng.gaussian_vector(m);
        const double gamma = 0.1 + rng.uniform();
        const Vector g = sys.a() * x + sys.drift();
        const Vector bu = sys.input() * u;
        const Vector euler = descent_step(sys, x, u, config(gamma, 1, Coupling::euler));
        const Vector direct = descent_step(sys, x, u, config(gamma, 1, Coupling::direct));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(euler[i] == doctest::Approx(x[i] - gamma * g[i] + gamma * bu[i]).epsilon(1e-13));
            CHECK(direct[i] == doctest::Approx(x[i] - gamma * g[i] + bu[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("zero policy is bitwise plain gradient descent")
{
    Rng rng(502);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const ControlSystem sys =
            make_system(random_psd(rng, n, n), rng.gaussian_vector(n), rng.gaussian_matrix(n, 2));
        const Vector x0 = rng.gaussian_vector(n);
        const double gamma = default_step(sys.problem());
        const auto xs = plain_gd(sys.a(), sys.drift(), x0, gamma, 50);
        const RunRecord rec = run_descent(sys, policy::Zero{}, x0, config(gamma, 50));
        CHECK(rec.iterations == 50);
        CHECK(rec.history.size() == 51);
        CHECK(rec.final_state == xs.back());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            CHECK(rec.history[k].f_value == eval(sys.problem(), xs[k]));
            CHECK(rec.history[k].control_norm == 0.0);
        }

        // A zero gradient-feedback gain injects B·0 and must leave the iterates unchanged.
        const RunRecord zero_gain = run_descent(sys, policy::GradientFeedback{Matrix(2, n)}, x0, config(gamma, 50));
        CHECK(zero_gain.final_state == rec.final_state);
    }
}

TEST_CASE("run_descent stopping and bookkeeping")
{
    const ControlSystem sys = make_system(Matrix::identity(2), Vector{-1.0, -1.0}, Matrix::identity(2));
    DescentConfig cfg = config(0.5, 100);
    cfg.stop_tol = 1e-12;
    const RunRecord at_opt = run_descent(sys, policy::Zero{}, Vector{1.0, 1.0}, cfg, Vector{1.0, 1.0});
    CHECK(at_opt.iterations == 0);
    CHECK(at_opt.converged);
    REQUIRE(at_opt.history.size() == 1);
    CHECK(*at_opt.history[0].dist_to_ref == 0.0);

    const RunRecord halving = run_descent(sys, policy::Zero{}, Vector{3.0, 3.0}, cfg, Vector{1.0, 1.0});
    CHECK(halving.converged);
    CHECK(halving.history[1].dist_to_ref.value() == doctest::Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(run_descent(sys, policy::Zero{}, Vector(3), cfg), DimensionError);
    CHECK_THROWS_AS(run_descent(sys, policy::StateFeedback{Matrix(3, 2)}, Vector(2), cfg), DimensionError);
}

TEST_CASE("schedule policy")
{
    const ControlSystem sys = make_system(Matrix::identity(1), Vector{0.0}, Matrix{{1.0}});
    const policy::Schedule sched{{Vector{1.0}, Vector{2.0}}};
    const RunRecord ok = run_descent(sys, sched, Vector{0.0}, config(1.0, 2, Coupling::direct));
    // x1 = 0 − 0 + 1, x2 = 1 − 1 + 2
    CHECK(ok.final_state == Vector{2.0});
    CHECK_THROWS_AS(run_descent(sys, sched, Vector{0.0}, config(1.0, 3)), ScheduleExhaustedError);
}

TEST_CASE("plain descent with step 1/L never increases the gradient norm")
{
    Rng rng(503);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 6;
        const ControlSystem sys =
            make_system(random_psd(rng, n, 1 + rng.below(n)), rng.gaussian_vector(n), Matrix(n, 1));
        const double gamma = 1.0 / spectral_norm(sys.a());
        const RunRecord rec = run_descent(sys, policy::Zero{}, rng.gaussian_vector(n), config(gamma, 200));
        for (std::size_t k = 1; k < rec.history.size(); ++k) {
            CHECK(rec.history[k].grad_norm <= rec.history[k - 1].grad_norm * (1.0 + 1e-12) + 1e-15);
        }
    }
}

TEST_CASE("design_feedback examples and Frobenius optimality")
{
    const Matrix a{{2.0, 1.0}, {1.0, 3.0}};
    CHECK(max_abs(design_feedback(make_system(a, Vector(2), Matrix::identity(2))) - a) < 1e-14);

    // B = e1: only the first row of A can be cancelled.
    const Matrix k = design_feedback(make_system(a, Vector(2), Matrix{{1.0}, {0.0}}));
    REQUIRE(k.rows() == 1);
    CHECK(k(0, 0) == doctest::Approx(2.0));
    CHECK(k(0, 1) == doctest::Approx(1.0));

    Rng rng(504);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const std::size_t m = 1 + rng.below(n);
        const ControlSystem sys = make_system(random_psd(rng, n, n), Vector(n), rng.gaussian_matrix(n, m));
        const Matrix kstar = design_feedback(sys);
        const double best = frobenius_norm(sys.a() - sys.input() * kstar);
        for (int probe = 0; probe < 5; ++probe) {
            const Matrix other = kstar + 0.1 * rng.gaussian_matrix(m, n);
            CHECK(best <= frobenius_norm(sys.a() - sys.input() * other) + 1e-12);
        }
    }
}

TEST_CASE("rate_certificate examples")
{
    const ControlSystem sys = make_system(Matrix::identity(2), Vector(2), Matrix::identity(2));
    const RateCertificate open = rate_certificate(sys, Matrix(2, 2), 0.5);
    CHECK(open.tau == doctest::Approx(1.0));
    CHECK(open.contraction == doctest::Approx(0.5));
    REQUIRE(open.fixed_point);
    CHECK(max_abs(*open.fixed_point) == 0.0);
    CHECK(open.preserves_argmin);

    const RateCertificate cancel = rate_certificate(sys, Matrix::identity(2), 0.5);
    CHECK(cancel.tau == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cancel.contraction == doctest::Approx(1.0));
    // A − BK = 0 and b = 0: every point is fixed, the min-norm one is the origin.
    REQUIRE(cancel.fixed_point);
    CHECK(max_abs(*cancel.fixed_point) == 0.0);
}

TEST_CASE("state feedback moves the fixed point off the minimizer when b ≠ 0")
{
    const ControlSystem sys = make_system(Matrix{{2.0}}, Vector{-2.0}, Matrix{{1.0}});
    const RateCertificate c = rate_certificate(sys, Matrix{{1.0}}, 0.25);
    REQUIRE(c.fixed_point);
    CHECK((*c.fixed_point)[0] == doctest::Approx(2.0)); // (2 − 1)x = 2
    CHECK_FALSE(c.preserves_argmin);

    const RateCertificate g = rate_certificate(sys, Matrix{{0.1}}, 0.25, FeedbackKind::gradient);
    REQUIRE(g.fixed_point);
    CHECK((*g.fixed_point)[0] == doctest::Approx(1.0));
    CHECK(g.preserves_argmin);
    // I − γ(I − BK)A = 1 − 0.25·0.9·2
    CHECK(g.contraction == doctest::Approx(0.55));
    const RateCertificate gp = rate_certificate(sys, Matrix{{0.1}}, 0.25, FeedbackKind::gradient, Coupling::direct);
    // I − (γI − BK)A = 1 − 0.15·2
    CHECK(gp.contraction == doctest::Approx(0.7));

    CHECK_THROWS_AS(rate_certificate(sys, Matrix{{1.0}}, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(rate_certificate(sys, Matrix(1, 2), 0.1), DimensionError);
}

TEST_CASE("rate_bound_curve examples")
{
    const RateBound r = rate_bound_curve(1.0, 0.5, 2.0, 3);
    REQUIRE(r.values.size() == 4);
    CHECK(r.values[0] == 2.0);
    CHECK(r.values[1] == 1.0);
    CHECK(r.values[2] == 0.5);
    CHECK(r.values[3] == 0.25);
    CHECK_FALSE(r.degenerate_base);

    const RateBound d = rate_bound_curve(2.0, 0.5, 1.0, 2);
    CHECK(d.degenerate_base);
    CHECK(d.values[1] == 0.0);
    CHECK(rate_bound_curve(3.0, 0.5, 1.0, 2).values[1] == -0.5);
    CHECK(rate_bound_curve(0.0, 0.5, 1.0, 0).values.size() == 1);
    CHECK_THROWS_AS(rate_bound_curve(1.0, 0.5, -1.0, 2), InvalidParameterError);
}

TEST_CASE("state-feedback iterates respect the certified contraction")
{
    Rng rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const std::size_t m = 1 + rng.below(n);
        const ControlSystem sys = make_system(random_psd(rng, n, n), Vector(n), rng.gaussian_matrix(n, m));
        const Matrix gain = 0.3 * rng.gaussian_matrix(m, n);
        const double gamma = default_step(sys.problem());
        const RateCertificate cert = rate_certificate(sys, gain, gamma);
        const Vector x0 = rng.gaussian_vector(n);
        const RunRecord rec = run_descent(sys, policy::StateFeedback{gain}, x0, config(gamma, 60), Vector(n));
        double bound = norm2(x0);
        for (const auto& h : rec.history) {
            CHECK(*h.dist_to_ref <= bound * (1.0 + 1e-10) + 1e-300);
            bound *= cert.contraction;
        }
    }
}

TEST_CASE("gradient feedback converges to the minimizer when contractive")
{
    Rng rng(506);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const std::size_t m = 1 + rng.below(n);
        Matrix a = random_psd(rng, n, n);
        a = a + 0.2 * Matrix::identity(n);
        const ControlSystem sys = make_system(a, rng.gaussian_vector(n), rng.gaussian_matrix(n, m));
        const double gamma = default_step(sys.problem());
        const Matrix gain = gamma * design_feedback(sys);
        const RateCertificate cert = rate_certificate(sys, gain, gamma, FeedbackKind::gradient);
        REQUIRE(cert.fixed_point);
        if (cert.contraction >= 1.0) {
            continue;
        }
        const RunRecord rec =
            run_descent(sys, policy::GradientFeedback{gain}, rng.gaussian_vector(n), config(gamma, 3000));
        CHECK(max_abs(rec.final_state - *cert.fixed_point) < 1e-8);
        CHECK(max_abs(gradient(sys.problem(), rec.final_state)) < 1e-8);
    }
}

} // TEST_SUITE

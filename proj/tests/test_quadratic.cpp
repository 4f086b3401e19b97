#include <cmath>

#include "ctrlgrad/errors.hpp"
#include "ctrlgrad/quadratic.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctrlgrad;
using ctrlgrad::testing::random_psd;

TEST_SUITE("quadratic") {

TEST_CASE("construction validates symmetry and semidefiniteness")
{
    CHECK_THROWS_WITH_AS(QuadraticProblem(Matrix{{1.0, 2.0}, {0.0, 1.0}}, Vector(2), 0.0), "A not symmetric",
                         ContractError);
    CHECK_THROWS_WITH_AS(QuadraticProblem(Matrix{{1.0, 0.0}, {0.0, -0.5}}, Vector(2), 0.0),
                         "A not positive semidefinite", ContractError);
    CHECK_THROWS_AS(QuadraticProblem(Matrix::identity(2), Vector(3), 0.0), DimensionError);
    CHECK_NOTHROW(QuadraticProblem(Matrix{{1.0, 1.0}, {1.0, 1.0}}, Vector(2), 0.0));
    CHECK_NOTHROW(QuadraticProblem(Matrix(3, 3), Vector(3), 1.0));
}

TEST_CASE("eval examples")
{
    CHECK(eval(QuadraticProblem(Matrix::identity(2), Vector(2), 0.0), Vector{3.0, 4.0}) == 12.5);
    const QuadraticProblem p(Matrix{{2.0, 0.0}, {0.0, 4.0}}, Vector{1.0, -1.0}, 3.0);
    CHECK(eval(p, Vector{1.0, 1.0}) == 6.0);
    CHECK_THROWS_AS(eval(p, Vector{1.0}), DimensionError);
}

TEST_CASE("gradient examples")
{
    const QuadraticProblem p(Matrix::identity(2), Vector{-1.0, -2.0}, 0.0);
    CHECK(gradient(p, Vector(2)) == p.b());
    CHECK(gradient(p, Vector{1.0, 2.0}) == Vector{0.0, 0.0});
    CHECK_THROWS_AS(gradient(p, Vector(3)), DimensionError);
}

TEST_CASE("gradient matches central finite differences")
{
    Rng rng(201);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 20;
        const QuadraticProblem p(random_psd(rng, n, n), rng.gaussian_vector(n), rng.gaussian());
        const Vector x = rng.gaussian_vector(n);
        const Vector g = gradient(p, x);
        const double scale = 1.0 + norm2(g);
        for (std::size_t i = 0; i < n; ++i) {
            Vector xp = x;
            Vector xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (eval(p, xp) - eval(p, xm)) / (2.0 * h);
            CHECK(std::abs(fd - g[i]) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("convexity along random chords")
{
    Rng rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const QuadraticProblem p(random_psd(rng, n, 1 + rng.below(n)), rng.gaussian_vector(n), 0.0);
        const Vector x = rng.gaussian_vector(n);
        const Vector y = rng.gaussian_vector(n);
        const double lam = rng.uniform();
        const double lhs = eval(p, lam * x + (1.0 - lam) * y);
        CHECK(lhs <= lam * eval(p, x) + (1.0 - lam) * eval(p, y) + 1e-10);
    }
}

TEST_CASE("from_least_squares examples")
{
    const QuadraticProblem p = from_least_squares(Matrix::identity(2), Vector{1.0, 2.0});
    CHECK(p.a() == Matrix::identity(2));
    CHECK(p.b() == Vector{-1.0, -2.0});
    CHECK(p.c() == doctest::Approx(2.5));

    const QuadraticProblem z = from_least_squares(Matrix{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}, Vector(3));
    CHECK(z.b() == Vector{0.0, 0.0});
    CHECK(z.c() == 0.0);

    CHECK_THROWS_AS(from_least_squares(Matrix::identity(2), Vector(3)), DimensionError);
}

TEST_CASE("from_least_squares evaluates to half the squared residual")
{
    Rng rng(203);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(8);
        const std::size_t n = 1 + rng.below(8);
        const Matrix b = rng.gaussian_matrix(m, n);
        const Vector y = rng.gaussian_vector(m);
        const Vector x = rng.gaussian_vector(n);
        const Vector r = b * x - y;
        const double direct = 0.5 * dot(r, r);
        CHECK(eval(from_least_squares(b, y), x) == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("solve_critical examples")
{
    const Vector x = solve_critical(QuadraticProblem(Matrix::identity(2), Vector{-1.0, -2.0}, 0.0));
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));

    const Vector y = solve_critical(QuadraticProblem(Matrix{{1.0, 0.0}, {0.0, 0.0}}, Vector{-2.0, 0.0}, 0.0));
    CHECK(y[0] == doctest::Approx(2.0));
    CHECK(y[1] == 0.0);

    CHECK_THROWS_AS(solve_critical(QuadraticProblem(Matrix{{1.0, 0.0}, {0.0, 0.0}}, Vector{0.0, 1.0}, 0.0)),
                    NoCriticalPointError);
}

TEST_CASE("solve_critical gives a stationary minimum")
{
    Rng rng(204);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 12;
        const Matrix a = random_psd(rng, n, 1 + rng.below(n));
        // b in range(A) so a critical point exists.
        const Vector b = a * rng.gaussian_vector(n);
        const QuadraticProblem p(a, b, 0.0);
        const Vector x = solve_critical(p);
        CHECK(norm2(gradient(p, x)) <= 1e-8 * (1.0 + norm2(b)));
        const double fmin = eval(p, x);
        for (int k = 0; k < 5; ++k) {
            CHECK(eval(p, x + 0.1 * rng.gaussian_vector(n)) >= fmin - 1e-12);
        }
    }
}

} // TEST_SUITE

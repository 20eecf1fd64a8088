#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"

using namespace tcgp;

namespace {

SampledFunction sample(const std::vector<double>& grid, double (*f)(double)) {
    SampledFunction g{grid, {}};
    for (double t : grid) g.values.push_back(f(t));
    return g;
}

std::vector<double> uniform_grid(double t_max, int n) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = t_max * i / n;
    return g;
}

// Graded grid t_i = T (i/n)^2, used to exercise the nonuniform weights.
std::vector<double> graded_grid(double t_max, int n) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = t_max * std::pow(double(i) / n, 2.0);
    return g;
}

}  // namespace

TEST_CASE("caputo_l1 is exact on linear functions, uniform and graded grids") {
    for (const auto& grid : {uniform_grid(2.0, 50), graded_grid(2.0, 50)}) {
        const auto d = caputo_l1(sample(grid, [](double t) { return t; }), 0.5);
        for (std::size_t i = 1; i < grid.size(); ++i)
            CHECK(d.values[i] == doctest::Approx(std::sqrt(grid[i]) / std::tgamma(1.5)).epsilon(1e-12));
    }
}

TEST_CASE("caputo_l1 of a constant vanishes") {
    const auto d = caputo_l1(sample(uniform_grid(1.0, 20), [](double) { return 3.7; }), 0.3);
    for (double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("caputo_l1 with beta = 1 differentiates t^2 to 2t") {
    const auto grid = graded_grid(1.5, 40);
    const auto d = caputo_l1(sample(grid, [](double t) { return t * t; }), 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(d.values[i] == doctest::Approx(2.0 * grid[i]).epsilon(1e-9));
}

TEST_CASE("caputo_l1 rejects bad input") {
    CHECK_THROWS_AS(caputo_l1(SampledFunction{{0.0}, {1.0}}, 0.5), DomainError);
    const auto g = sample(uniform_grid(1.0, 4), [](double t) { return t; });
    CHECK_THROWS_AS(caputo_l1(g, 0.0), DomainError);
    CHECK_THROWS_AS(caputo_l1(g, 1.2), DomainError);
    CHECK_THROWS_AS(caputo_l1(SampledFunction{{0.0, 0.5, 0.5}, {0, 1, 2}}, 0.5), DomainError);
}

TEST_CASE("caputo_l1 is linear") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto grid = graded_grid(3.0, 60);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = u(gen), b = u(gen);
        SampledFunction f{grid, {}}, h{grid, {}}, c{grid, {}};
        for (double t : grid) {
            f.values.push_back(std::sin(t) + u(gen) * 0.01);
            h.values.push_back(t * t - u(gen) * 0.01);
            c.values.push_back(a * f.values.back() + b * h.values.back());
        }
        const auto df = caputo_l1(f, 0.4), dh = caputo_l1(h, 0.4), dc = caputo_l1(c, 0.4);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(dc.values[i] == doctest::Approx(a * df.values[i] + b * dh.values[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("caputo_l1 converges on power laws at the expected order") {
    const double beta = 0.5, a = 2.0;
    const double exact = std::tgamma(a + 1.0) / std::tgamma(a - beta + 1.0);  // at t = 1
    double prev = 0.0;
    for (int n : {50, 100, 200, 400}) {
        const auto d = caputo_l1(sample(uniform_grid(1.0, n), [](double t) { return t * t; }), beta);
        const double err = std::abs(d.values.back() - exact);
        if (prev > 0.0) CHECK(std::log2(prev / err) > 1.4);  // 2 - beta = 1.5
        prev = err;
    }
}

TEST_CASE("riemann_liouville_integral closed forms") {
    const auto grid = graded_grid(2.0, 30);
    const auto one = sample(grid, [](double) { return 1.0; });
    const auto j1 = riemann_liouville_integral(one, 1.0);
    const auto jh = riemann_liouville_integral(one, 0.5);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(j1.values[i] == doctest::Approx(grid[i]).epsilon(1e-12));
        CHECK(jh.values[i] == doctest::Approx(std::sqrt(grid[i]) / std::tgamma(1.5)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(riemann_liouville_integral(one, 0.0), DomainError);
}

TEST_CASE("J^{1-beta} of the derivative matches caputo_l1") {
    const auto grid = uniform_grid(1.0, 400);
    const auto deriv = sample(grid, [](double t) { return 2.0 * t; });
    const auto composed = riemann_liouville_integral(deriv, 0.5);
    const auto direct = caputo_l1(sample(grid, [](double t) { return t * t; }), 0.5);
    for (std::size_t i = 40; i < grid.size(); i += 40)
        CHECK(composed.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-3));
}

TEST_CASE("riemann_liouville_integral has the semigroup property") {
    // The inner integral behaves like t^0.3 near 0, which limits the
    // piecewise-linear rule; check the gap is small and shrinks with h.
    double prev = 0.0;
    for (int n : {200, 800}) {
        const auto grid = uniform_grid(2.0, n);
        const auto g = sample(grid, [](double t) { return std::cos(t); });
        const auto lhs = riemann_liouville_integral(riemann_liouville_integral(g, 0.3), 0.4);
        const auto rhs = riemann_liouville_integral(g, 0.7);
        double gap = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid[i] >= 0.2) gap = std::max(gap, std::abs(lhs.values[i] - rhs.values[i]));
        CHECK(gap < 4e-3);
        if (prev > 0.0) CHECK(gap < 0.6 * prev);
        prev = gap;
    }
}

TEST_CASE("mittag_leffler special values") {
    CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    for (double a : {0.2, 0.5, 0.9}) CHECK(mittag_leffler(a, 0.0) == 1.0);
    CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(0.427583576155807).epsilon(1e-10));
    CHECK_THROWS_AS(mittag_leffler(0.0, -1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(1.5, -1.0), DomainError);
}

TEST_CASE("mittag_leffler at alpha = 1/2 against exp(x^2) erfc(x)") {
    for (double x : {0.1, 0.7, 2.0, 4.9, 5.1, 8.0, 10.0}) {
        const double oracle = std::exp(x * x) * std::erfc(x);
        CHECK(mittag_leffler(0.5, -x) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("mittag_leffler against Laplace inversion of s^{a-1}/(s^a+1)") {
    for (double a : {0.3, 0.7, 0.95}) {
        LaplaceFunction F{[a](Complex s) { return std::pow(s, a - 1.0) / (std::pow(s, a) + 1.0); }, 0.0, true};
        for (double t : {0.2, 1.0, 3.0, 12.0}) {
            const double oracle = invert_talbot(F, t, 32);
            CHECK(mittag_leffler(a, -std::pow(t, a)) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("mittag_leffler(alpha, -x) is positive and decreasing") {
    for (double a : {0.25, 0.5, 0.75, 1.0}) {
        double prev = 1.0 + 1e-15;
        for (double x = 0.0; x <= 40.0; x += 0.25) {
            const double v = mittag_leffler(a, -x);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("laplace_forward closed forms") {
    CHECK(std::abs(laplace_forward([](double) { return 1.0; }, Complex(2.0)).value - 0.5) < 1e-10);
    auto decay = [](double t) { return std::exp(-t); };
    CHECK(std::abs(laplace_forward(decay, Complex(1.0)).value - 0.5) < 1e-10);
    const Complex s(1.0, 7.0);
    CHECK(std::abs(laplace_forward(decay, s).value - 1.0 / (s + 1.0)) < 1e-10);
    CHECK(std::abs(laplace_forward(decay, std::conj(s)).value - 1.0 / (std::conj(s) + 1.0)) < 1e-10);
    // OU variance derivative sigma^2 exp(-2 alpha t).
    const double alpha = 0.5, sigma = 1.3;
    auto rprime = [=](double t) { return sigma * sigma * std::exp(-2.0 * alpha * t); };
    for (double sv : {0.5, 1.0, 3.0})
        CHECK(std::abs(laplace_forward(rprime, Complex(sv)).value - sigma * sigma / (sv + 2.0 * alpha)) < 1e-9);
    CHECK_THROWS_AS(laplace_forward(decay, Complex(-0.5)), DomainError);
    CHECK_THROWS_AS(laplace_forward(decay, Complex(0.5), 1.0), DomainError);
}

TEST_CASE("laplace_forward of sampled data") {
    const auto grid = uniform_grid(25.0, 5000);
    const auto g = sample(grid, [](double t) { return std::exp(-t); });
    for (Complex s : {Complex(0.5), Complex(1.0, 2.0), Complex(3.0, -1.0)})
        CHECK(std::abs(laplace_forward(g, s).value - 1.0 / (s + 1.0)) < 1e-5);
    // Constant continuation: g = 1 is transformed exactly.
    const auto one = sample(uniform_grid(1.0, 3), [](double) { return 1.0; });
    CHECK(std::abs(laplace_forward(one, Complex(2.0, 1.0)).value - 1.0 / Complex(2.0, 1.0)) < 1e-14);
}

TEST_CASE("laplace_inverse closed-form pairs, each method") {
    const LaplaceFunction inv_s{[](Complex s) { return 1.0 / s; }, 0.0, true};
    const LaplaceFunction inv_s2{[](Complex s) { return 1.0 / (s * s); }, 0.0, true};
    const LaplaceFunction heat{[](Complex s) { return std::exp(-std::sqrt(s)) / std::sqrt(s); }, 0.0, true};
    const double heat_exact = std::exp(-0.25) / std::sqrt(std::numbers::pi);
    CHECK(laplace_inverse(inv_s, 3.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(laplace_inverse(inv_s2, 2.5) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(laplace_inverse(heat, 1.0) == doctest::Approx(heat_exact).epsilon(1e-9));
    CHECK(invert_cohen(heat, 1.0, 30, 16) == doctest::Approx(heat_exact).epsilon(1e-7));
    CHECK(invert_de_hoog(heat, 1.0, 20, 1e-12) == doctest::Approx(heat_exact).epsilon(1e-9));
    CHECK_THROWS_AS(laplace_inverse(inv_s, 0.0), DomainError);
}

TEST_CASE("the heat-kernel pair verified by forward transformation") {
    auto candidate = [](double t) { return std::exp(-1.0 / (4.0 * t)) / std::sqrt(std::numbers::pi * t); };
    for (double s : {0.5, 1.0, 2.0}) {
        const Complex expect = std::exp(-std::sqrt(s)) / std::sqrt(s);
        CHECK(std::abs(laplace_forward(candidate, Complex(s)).value - expect) < 1e-9);
    }
}

TEST_CASE("laplace_inverse honors a positive abscissa") {
    const LaplaceFunction F{[](Complex s) { return 1.0 / (s - 2.0); }, 2.0, true};
    CHECK(laplace_inverse(F, 1.5) == doctest::Approx(std::exp(3.0)).epsilon(1e-8));
    LaplaceFunction G = F;
    G.cut_plane_analytic = false;
    CHECK(laplace_inverse(G, 1.5) == doctest::Approx(std::exp(3.0)).epsilon(1e-8));
}

TEST_CASE("laplace_inverse reports method disagreement") {
    // A pure delay has no cut-plane continuation; the two methods disagree.
    const LaplaceFunction F{[](Complex s) { return std::exp(-s) / s; }, 0.0, true};
    CHECK_THROWS_AS(laplace_inverse(F, 1.0), NumericalError);
}

TEST_CASE("round trip laplace_inverse(laplace_forward(g)) on [0.1, 10]") {
    auto g = [](double t) { return 1.0 + std::cos(t) * std::exp(-0.5 * t); };
    Tolerances tol;
    tol.quadrature = 1e-13;
    LaplaceFunction F{[&](Complex s) { return laplace_forward(g, s, 0.0, tol).value; }, 0.0, false};
    for (double t : {0.1, 0.5, 2.0, 10.0})
        CHECK(laplace_inverse(F, t) == doctest::Approx(g(t)).epsilon(1e-6));
}

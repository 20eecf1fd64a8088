#include "doctest.h"

#include <cmath>

#include "tcgp/errors.hpp"
#include "tcgp/lambdaop.hpp"
#include "tcgp/timechange.hpp"

using namespace tcgp;

namespace {

// G^beta_gamma[t^a](t) from the Mellin-Barnes form of the contour integral:
// (1/2 pi i) int w^{-a-1} (1 - w^beta)^{-gamma-1} dw
//   = Gamma(a/beta + gamma + 1) / (beta Gamma(a/beta + 1) Gamma(gamma + 1)),
// a beta integral after closing the contour around the cut [1, inf).
double g_of_power(double beta, double gamma, double a, double t) {
    return std::tgamma(a + 1) * std::tgamma(a / beta + gamma + 1) /
           (std::tgamma(a / beta + 1) * std::tgamma(a + beta * gamma + 1)) * std::pow(t, a + beta * gamma);
}

TransformableInput power(double a, double scale = 1.0) {
    return TransformableInput::analytic(
        [a, scale](Complex z) { return scale * std::tgamma(a + 1) * std::pow(z, -a - 1); });
}

const TransformableInput one = power(0.0);
const TransformableInput ramp = power(1.0);
const TransformableInput decay = TransformableInput::analytic([](Complex z) { return 1.0 / (z + 1.0); }, -1.0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

SampledFunction sampled(double t_max, std::size_t n, double (*f)(double)) {
    SampledFunction s{std::vector<double>(n + 1), std::vector<double>(n + 1)};
    for (std::size_t i = 0; i <= n; ++i) {
        s.grid[i] = t_max * double(i) / double(n);
        s.values[i] = f(s.grid[i]);
    }
    return s;
}

// Subordinated density of a model on a uniform (t, x) grid; slice 0 is the
// lattice point mass at x = 0 (x = 0 must be a node).
// Time nodes t_n = (n/n_t)^grade; grading resolves the t -> 0 singularity of the density.
GridDensity subordinated_grid(const CovarianceModel& model, double beta, std::size_t n_t, std::size_t n_x, double half,
                              double grade = 1.0) {
    const TimeChangedSpec spec{GaussianSpec::isotropic(model), SubordinatorSpec::stable(beta)};
    std::vector<double> t, x(n_x);
    for (std::size_t n = 1; n <= n_t; ++n) t.push_back(std::pow(double(n) / n_t, grade));
    const double h = 2.0 * half / double(n_x - 1);
    for (std::size_t k = 0; k < n_x; ++k) x[k] = -half + h * double(k);
    const auto inner = subordinated_density_grid(spec, t, x);
    GridDensity g;
    g.x_grid = x;
    g.t_grid = {0.0};
    g.t_grid.insert(g.t_grid.end(), t.begin(), t.end());
    g.values.assign(n_x, 0.0);
    g.values[n_x / 2] = 1.0 / h;
    g.values.insert(g.values.end(), inner.values.begin(), inner.values.end());
    return g;
}

}  // namespace

TEST_CASE("G on constants matches the second-moment formula") {
    CHECK(rel(eval_G(OperatorSpec::G(0.6, 0.4), one, 1.0).value, g_of_power(0.6, 0.4, 0.0, 1.0)) < 1e-3);
    for (double t : {0.5, 1.0, 2.0}) {
        for (auto [beta, gamma] : {std::pair{0.5, 0.4}, {0.7, -0.3}}) {
            const auto e = eval_G(OperatorSpec::G(beta, gamma), one, t);
            CHECK(rel(e.value, std::tgamma(gamma + 1) * std::pow(t, gamma * beta) / std::tgamma(gamma * beta + 1)) < 1e-8);
            CHECK(e.error < 1e-5);
        }
    }
}

TEST_CASE("G with gamma = 0 is the identity, and powers follow the Mellin-Barnes formula") {
    const auto g0 = OperatorSpec::G(0.6, 0.0);
    for (double t : {0.5, 2.0}) {
        CHECK(eval_G(g0, one, t).value == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(eval_G(g0, ramp, t).value == doctest::Approx(t).epsilon(1e-3));
        CHECK(eval_G(g0, decay, t).value == doctest::Approx(std::exp(-t)).epsilon(1e-3));
    }
    for (auto [beta, gamma] : {std::pair{0.5, 0.4}, {0.6, -0.3}}) {
        const auto spec = OperatorSpec::G(beta, gamma);
        CHECK(rel(eval_G(spec, ramp, 1.3).value, g_of_power(beta, gamma, 1.0, 1.3)) < 1e-6);
        CHECK(rel(eval_G(spec, power(0.5), 0.8).value, g_of_power(beta, gamma, 0.5, 0.8)) < 1e-6);
    }
}

TEST_CASE("G near beta = 1 approaches multiplication by t^gamma") {
    const auto spec = OperatorSpec::G(0.999, 0.4);
    for (double t : {0.5, 1.0, 2.0}) CHECK(rel(eval_G(spec, one, t).value, std::pow(t, 0.4)) < 1e-2);
}

TEST_CASE("G is linear and contour-independent") {
    const auto spec = OperatorSpec::G(0.5, 0.4);
    const auto mix = TransformableInput::analytic([](Complex z) { return 1.0 / z + 2.0 / (z + 1.0); });
    const double lhs = eval_G(spec, mix, 1.0).value;
    const double rhs = eval_G(spec, one, 1.0).value + 2.0 * eval_G(spec, decay, 1.0).value;
    CHECK(rel(lhs, rhs) < 1e-8);

    const auto base = eval_G(spec, decay, 1.0);
    for (double fraction : {0.25, 0.75}) {
        auto moved = spec;
        moved.contour_fraction = fraction;
        const auto e = eval_G(moved, decay, 1.0);
        CHECK(std::abs(e.value - base.value) <= e.error + base.error);
    }
}

TEST_CASE("G composes additively in gamma on constants") {
    const double beta = 0.6, g1 = 0.2, g2 = 0.3;
    const double a = beta * g2;
    const double amplitude = std::tgamma(g2 + 1) / std::tgamma(a + 1);  // G_{g2}[1] = amplitude t^a
    for (double t : {0.5, 1.0, 2.0}) {
        const double lhs = eval_G(OperatorSpec::G(beta, g1), power(a, amplitude), t).value;
        const double rhs = eval_G(OperatorSpec::G(beta, g1 + g2), one, t).value;
        CHECK(rel(lhs, rhs) < 5e-3);
    }
}

TEST_CASE("Lambda: fBm correspondence with G, Brownian moment identity, mixtures") {
    auto lambda = OperatorSpec::Lambda(SubordinatorSpec::stable(0.5), CovarianceModel::fbm(0.7));
    lambda.outer_integral = 0.5;
    const auto g = OperatorSpec::G(0.5, 0.4);
    for (double t : {0.5, 1.0, 2.0}) {
        for (const auto* in : {&one, &decay}) {
            const double lhs = eval_Lambda(lambda, *in, t).value;
            const double rhs = 0.7 * eval_G(g, *in, t).value;
            CHECK(rel(lhs, rhs) < 1e-3);
        }
    }

    // d/dt Var(B_{E_t}) = 2 Lambda[1], Var = E[E_t].
    const auto sub = SubordinatorSpec::stable(0.6);
    const auto bm = OperatorSpec::Lambda(sub, CovarianceModel::brownian());
    for (double t : {0.5, 1.0, 2.0}) {
        const double d = 1e-4 * t;
        const double slope = (inverse_time_moment(sub, t + d, 1.0) - inverse_time_moment(sub, t - d, 1.0)) / (2 * d);
        CHECK(rel(2.0 * eval_Lambda(bm, one, t).value, slope) < 1e-3);
    }

    const auto pure = OperatorSpec::Lambda(SubordinatorSpec::stable(0.5), CovarianceModel::fbm(0.7));
    const auto mixed = OperatorSpec::Lambda(SubordinatorSpec::mixture({{0.5, 1.0}}), CovarianceModel::fbm(0.7));
    CHECK(std::abs(eval_Lambda(mixed, one, 1.0).value - eval_Lambda(pure, one, 1.0).value) < 1e-8);

    CHECK_THROWS_AS(OperatorSpec::Lambda(sub, CovarianceModel::piecewise_hurst({0.0, 1.0}, {0.5, 0.7})), DomainError);
    CHECK_THROWS_AS(OperatorSpec::G(0.5, 1.0), DomainError);
    CHECK_THROWS_AS(eval_G(g, one, 0.0), DomainError);
}

TEST_CASE("moment chain: D^beta Var of time-changed fBm equals 2H G[1]") {
    const double beta = 0.5, h = 0.7;
    const auto sub = SubordinatorSpec::stable(beta);
    // Graded grid resolves the t^{2H beta} start of the variance.
    const std::size_t n = 2000;
    SampledFunction var{std::vector<double>(n + 1), std::vector<double>(n + 1)};
    for (std::size_t i = 0; i <= n; ++i) {
        var.grid[i] = 2.0 * std::pow(double(i) / n, 2.0);
        var.values[i] = i == 0 ? 0.0 : inverse_time_moment(sub, var.grid[i], 2 * h);
    }
    const auto d = caputo_l1(var, beta);
    const auto g = OperatorSpec::G(beta, 2 * h - 1);
    for (std::size_t i : {500, 800, 1200, 1600, 2000}) {
        CHECK(rel(d.values[i], 2 * h * eval_G(g, one, var.grid[i]).value) < 1e-3);
    }
}

TEST_CASE("sampled operands: time-domain factorization agrees with the contour") {
    for (auto [beta, gamma] : {std::pair{0.5, 0.4}, {0.6, -0.3}}) {
        const auto spec = OperatorSpec::G(beta, gamma);
        const auto s = TransformableInput::sampled(sampled(2.0, 1600, [](double t) { return std::exp(-t); }));
        for (double t : {0.5, 1.0, 2.0}) CHECK(std::abs(eval_G(spec, s, t).value - eval_G(spec, decay, t).value) < 1e-3);
        const auto lin = apply_G(beta, gamma, sampled(2.0, 1600, [](double t) { return t; }));
        CHECK(rel(lin.values[800], g_of_power(beta, gamma, 1.0, 1.0)) < 1e-3);
    }
    const auto g = sampled(1.0, 100, [](double t) { return std::cos(t); });
    CHECK(apply_G(0.5, 0.0, g).values == g.values);
    const auto unit = apply_G(1.0, 0.4, g);
    CHECK(unit.values[50] == doctest::Approx(std::pow(0.5, 0.4) * std::cos(0.5)));
}

TEST_CASE("fBm FPKE residual") {
    // H = 1/2: the Brownian check D^beta q - q''/2.
    const auto bm = subordinated_grid(CovarianceModel::brownian(), 0.5, 200, 201, 8.0, 2.0);
    const auto r = fbm_fpke_residual(0.5, SubordinatorSpec::stable(0.5), bm);
    CHECK(r.slices.size() == 200);
    CHECK(r.slices.back().linf <= 5e-3);

    // H = 0.7: the second-moment projection of the residual.
    const double h = 0.7, beta = 0.5;
    const auto fbm = subordinated_grid(CovarianceModel::fbm(h), beta, 300, 301, 8.0, 2.0);
    const auto f = fbm_fpke_residual(h, SubordinatorSpec::stable(beta), fbm);
    const std::size_t m = f.x_grid.size();
    std::vector<double> weighted(m);
    for (std::size_t c = 0; c < m; ++c) weighted[c] = f.x_grid[c] * f.x_grid[c] * f.values[(f.t_grid.size() - 1) * m + c];
    const double projection = trapezoid(f.x_grid, weighted);
    const double scale = 2 * h * std::tgamma(2 * h) / std::tgamma(beta * (2 * h - 1) + 1);  // D^beta Var at t = 1
    CHECK(std::abs(projection) / scale <= 1e-3);

    GridDensity zero = bm;
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    for (const auto& s : fbm_fpke_residual(0.7, SubordinatorSpec::stable(0.5), zero).slices) CHECK(s.l2 == 0.0);

    CHECK_THROWS_AS(fbm_fpke_residual(1.0, SubordinatorSpec::stable(0.5), bm), DomainError);
    CHECK_THROWS_AS(fbm_fpke_residual(0.7, SubordinatorSpec::mixture({{0.4, 0.5}, {0.8, 0.5}}), bm), DomainError);
}

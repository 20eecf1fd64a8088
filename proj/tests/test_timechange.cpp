#include "doctest.h"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"
#include "tcgp/timechange.hpp"

using namespace tcgp;

namespace {

constexpr double pi = std::numbers::pi;

TimeChangedSpec bm(double beta) {
    return {GaussianSpec::isotropic(CovarianceModel::brownian()), SubordinatorSpec::stable(beta)};
}

double q1(const TimeChangedSpec& spec, double t, double x) { return subordinated_density(spec, t, {&x, 1}); }

// (1/pi) int_0^inf E_beta(-k^2 t^beta / 2) cos(kx) dk, the Fourier-side solution.
double fourier_oracle(double beta, double t, double x) {
    auto f = [&](double k) { return mittag_leffler(beta, -0.5 * k * k * std::pow(t, beta)); };
    if (x == 0.0) {
        boost::math::quadrature::exp_sinh<double> es;
        return es.integrate(f, 1e-12) / pi;
    }
    // Half-period integrals alternate in sign; repeated averaging of the
    // partial sums accelerates the tail.
    std::vector<double> partial;
    double sum = 0.0;
    for (int n = 0; n < 80; ++n) {
        const double a = (n == 0 ? 0.0 : (n - 0.5) * pi / x), b = (n + 0.5) * pi / x;
        sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double k) { return f(k) * std::cos(k * x); }, a, b, 10, 1e-13);
        partial.push_back(sum);
    }
    for (int level = 0; level < 30; ++level) {
        for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        partial.pop_back();
    }
    return partial.back() / pi;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

// Gauss-Legendre probabilities of the bins of `edges` under a 1-D density
// evaluated on all nodes at once.
template <class GridEval>
std::vector<double> bin_probabilities(const std::vector<double>& edges, GridEval&& eval) {
    const auto& nodes = boost::math::quadrature::gauss<double, 7>::abscissa();
    const auto& weights = boost::math::quadrature::gauss<double, 7>::weights();
    std::vector<double> xs, ws;
    std::vector<std::size_t> owner;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        const double c = 0.5 * (edges[b] + edges[b + 1]), r = 0.5 * (edges[b + 1] - edges[b]);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            for (int sign : {-1, 1}) {
                if (k == 0 && sign == 1) continue;
                xs.push_back(c + sign * r * nodes[k]);
                ws.push_back(r * weights[k]);
                owner.push_back(b);
            }
        }
    }
    const auto values = eval(xs);
    std::vector<double> probs(edges.size() - 1, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) probs[owner[i]] += ws[i] * values[i];
    return probs;
}

}  // namespace

TEST_CASE("deterministic clock reproduces the base density") {
    const TimeChangedSpec spec{GaussianSpec::isotropic(CovarianceModel::fbm(0.7)), SubordinatorSpec::stable(1.0)};
    for (double x : {0.0, 0.4, -2.0}) {
        CHECK(q1(spec, 1.3, x) == gaussian_transition_density(spec.gauss, 1.3, {&x, 1}));
    }
    const double x = 0.2;
    CHECK(laplace_subordination_residual(spec, 2.0, {&x, 1}) < 1e-8);
}

TEST_CASE("Brownian subordinated density matches the Fourier Mittag-Leffler representation") {
    const auto spec = bm(0.5);
    for (double x : {0.0, 0.5, 1.5}) CHECK(std::abs(q1(spec, 1.0, x) - fourier_oracle(0.5, 1.0, x)) < 1e-5);
    CHECK(std::abs(q1(bm(0.8), 0.7, 0.3) - fourier_oracle(0.8, 0.7, 0.3)) < 1e-5);
}

TEST_CASE("subordinated densities are normalized, symmetric, and spread like E[E_t]") {
    std::vector<double> panels;
    for (int k = 0; k <= 160; ++k) panels.push_back(0.25 * k);
    auto half_line = [&](const TimeChangedSpec& spec, double t, int power) {
        const auto parts = bin_probabilities(panels, [&](const std::vector<double>& xs) {
            const std::vector<double> ts = {t};
            auto v = subordinated_density_grid(spec, ts, xs).values;
            for (std::size_t i = 0; i < xs.size(); ++i) v[i] *= std::pow(xs[i], power);
            return v;
        });
        double sum = 0.0;
        for (double v : parts) sum += v;
        return 2.0 * sum;
    };
    const TimeChangedSpec ou{GaussianSpec::isotropic(CovarianceModel::ou(1.0, 1.0)), SubordinatorSpec::stable(0.7)};
    CHECK(half_line(ou, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    for (double x : {0.1, 0.9, 2.5}) CHECK(q1(ou, 1.0, x) == doctest::Approx(q1(ou, 1.0, -x)).epsilon(1e-12));

    const auto spec = bm(0.6);
    double previous = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
        const double var = half_line(spec, t, 2);
        CHECK(half_line(spec, t, 0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(var == doctest::Approx(std::pow(t, 0.6) / std::tgamma(1.6)).epsilon(1e-6));
        CHECK(var > previous);
        previous = var;
    }
}

TEST_CASE("one-component mixtures reproduce the stable density") {
    const TimeChangedSpec mix{GaussianSpec::isotropic(CovarianceModel::brownian()),
                              SubordinatorSpec::mixture({{0.5, 1.0}})};
    for (double x : {0.0, 0.7, 2.0}) CHECK(std::abs(q1(mix, 1.0, x) - q1(bm(0.5), 1.0, x)) < 1e-8);
}

TEST_CASE("Laplace subordination identity") {
    double x = 0.3;
    CHECK(laplace_subordination_residual(bm(0.5), 2.0, {&x, 1}) <= 1e-4);
    const TimeChangedSpec mix{GaussianSpec::isotropic(CovarianceModel::brownian()),
                              SubordinatorSpec::mixture({{0.4, 0.5}, {0.8, 0.5}})};
    x = 0.0;
    CHECK(laplace_subordination_residual(mix, 1.5, {&x, 1}) <= 1e-3);
}

TEST_CASE("density grid agrees with pointwise evaluation and records mass") {
    const auto spec = bm(0.5);
    std::vector<double> xs;
    for (int k = -300; k <= 300; ++k) xs.push_back(k * 0.04);
    const std::vector<double> ts = {0.5, 1.0};
    const auto g = subordinated_density_grid(spec, ts, xs);
    CHECK(g.at(1, 300) == doctest::Approx(q1(spec, 1.0, 0.0)).epsilon(1e-14));
    CHECK(g.at(0, 350) == doctest::Approx(q1(spec, 0.5, 2.0)).epsilon(1e-14));
    for (double e : g.mass_error) CHECK(e < 1e-3);
    const std::vector<double> bad = {0.0};
    CHECK_THROWS_AS(subordinated_density_grid(spec, bad, xs), DomainError);
}

TEST_CASE("time-changed sampling: moments") {
    const std::vector<double> grid = {0.0, 0.5, 1.0};
    const std::size_t n = 100000;
    const auto e = sample_timechanged_paths(bm(0.5), grid, n, {21, 0});
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double v = e.at(p, 2) * e.at(p, 2);
        s += v;
        s2 += v * v;
    }
    double mean = s / n;
    CHECK(std::abs(mean - 1.0 / std::tgamma(1.5)) < 3.0 * std::sqrt((s2 / n - mean * mean) / n));

    const double h = 0.7, beta = 0.6;
    const TimeChangedSpec fb{GaussianSpec::isotropic(CovarianceModel::fbm(h)), SubordinatorSpec::stable(beta)};
    const auto f = sample_timechanged_paths(fb, grid, n, {22, 0});
    for (std::size_t i : {1, 2}) {
        s = s2 = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double v = f.at(p, i) * f.at(p, i);
            s += v;
            s2 += v * v;
        }
        mean = s / n;
        const double t = grid[i];
        const double expected = std::tgamma(2 * h + 1) * std::pow(t, 2 * h * beta) / std::tgamma(2 * h * beta + 1);
        CHECK(std::abs(mean - expected) < 3.0 * std::sqrt((s2 / n - mean * mean) / n));
    }
}

TEST_CASE("deterministic clock sampling matches Gaussian sampling in law") {
    const std::vector<double> grid = {0.0, 0.4, 1.0};
    const std::size_t n = 20000;
    const auto spec = TimeChangedSpec{GaussianSpec::isotropic(CovarianceModel::fbm(0.3)), SubordinatorSpec::stable(1.0)};
    const auto a = sample_timechanged_paths(spec, grid, n, {3, 0});
    const auto b = sample_gaussian_paths(spec.gauss, grid, n, {4, 0});
    for (std::size_t i : {1, 2}) {
        std::vector<double> va(n), vb(n);
        for (std::size_t p = 0; p < n; ++p) {
            va[p] = a.at(p, i);
            vb[p] = b.at(p, i);
        }
        CHECK(ks_two_sample(va, vb) < 1.628 * std::sqrt(2.0 / n));
    }
}

TEST_CASE("time-changed Brownian increments scale with clock increments") {
    const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    const auto spec = TimeChangedSpec{GaussianSpec::isotropic(CovarianceModel::brownian()), SubordinatorSpec::stable(0.3)};
    const std::size_t n = 20000;
    const auto e = sample_timechanged_paths(spec, grid, n, {8, 0});
    const auto clock = sample_inverse_times(spec.sub, grid, n, 8);
    double s2 = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double de = clock.at(p, i) - clock.at(p, i - 1);
            if (de <= 1e-9) continue;
            const double z = (e.at(p, i) - e.at(p, i - 1)) / std::sqrt(de);
            s2 += z * z;
            ++count;
        }
    }
    CHECK(count > n);
    CHECK(std::abs(s2 / count - 1.0) < 3.0 * std::sqrt(2.0 / count));
    const auto again = sample_timechanged_paths(spec, grid, n, {8, 0});
    CHECK(again.values == e.values);
}

TEST_CASE("empirical densities and chi-square checks") {
    const std::vector<double> grid = {0.0, 1.0};
    const std::size_t n = 100000;
    const auto b = sample_gaussian_paths(GaussianSpec::isotropic(CovarianceModel::brownian()), grid, n, {31, 0});
    const auto h = empirical_density(b, 1.0, 50);
    double mass = 0.0;
    for (std::size_t k = 0; k < 50; ++k) mass += h.density[k] * (h.edges[k + 1] - h.edges[k]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.n_samples == n);
    const boost::math::normal standard;
    std::vector<double> probs(50);
    for (std::size_t k = 0; k < 50; ++k)
        probs[k] = boost::math::cdf(standard, h.edges[k + 1]) - boost::math::cdf(standard, h.edges[k]);
    CHECK(chi_square_test(h, probs).p_value > 0.01);

    // The same test must reject a wrong reference.
    std::vector<double> wrong(50);
    const boost::math::normal wide(0.0, 1.05);
    for (std::size_t k = 0; k < 50; ++k)
        wrong[k] = boost::math::cdf(wide, h.edges[k + 1]) - boost::math::cdf(wide, h.edges[k]);
    CHECK(chi_square_test(h, wrong).p_value < 0.01);

    const auto spec = bm(0.5);
    const auto e = sample_timechanged_paths(spec, grid, n, {32, 0});
    const auto he = empirical_density(e, 1.0, 50, -4.0, 4.0);
    const auto ref = bin_probabilities(he.edges, [&](const std::vector<double>& xs) {
        const std::vector<double> ts = {1.0};
        const auto g = subordinated_density_grid(spec, ts, xs);
        return std::vector<double>(g.values.begin(), g.values.end());
    });
    CHECK(chi_square_test(he, ref).p_value > 0.01);

    CHECK_THROWS_AS(empirical_density(b, 0.5, 50), DomainError);
    CHECK_THROWS_AS(empirical_density(b, 1.0, 5), DomainError);
}

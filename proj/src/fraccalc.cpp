#include "tcgp/fraccalc.hpp"

#include <cmath>
#include <string>

#include "tcgp/errors.hpp"

namespace tcgp {

void SampledFunction::validate() const {
    detail::require(grid.size() == values.size(), "sampled function: grid and values differ in length");
    detail::require(!grid.empty(), "sampled function: empty grid");
    detail::require(grid.front() == 0.0, "sampled function: grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("sampled function: grid not strictly increasing at index " +
                              std::to_string(i));
    }
    for (double v : values) detail::require(std::isfinite(v), "sampled function: non-finite value");
}

std::vector<double> l1_weights(std::span<const double> grid, std::size_t n, double beta) {
    detail::require(beta > 0.0 && beta < 1.0, "l1 weights require beta in (0,1)");
    detail::require(n >= 1 && n < grid.size(), "l1 weights: node index out of range");
    const double exponent = 1.0 - beta;
    const double norm = 1.0 / std::tgamma(2.0 - beta);
    const double tn = grid[n];
    std::vector<double> w(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double h = grid[k] - grid[k - 1];
        const double far = std::pow(tn - grid[k - 1], exponent);
        const double near = (k == n) ? 0.0 : std::pow(tn - grid[k], exponent);
        w[k - 1] = norm * (far - near) / h;
    }
    return w;
}

namespace {

SampledFunction finite_difference_derivative(const SampledFunction& g) {
    const auto& t = g.grid;
    const auto& y = g.values;
    const std::size_t n = t.size();
    SampledFunction out{t, std::vector<double>(n)};
    if (n == 2) {
        const double d = (y[1] - y[0]) / (t[1] - t[0]);
        out.values = {d, d};
        return out;
    }
    // Three-point formulas, exact for quadratics on nonuniform grids.
    auto three_point = [&](std::size_t i0, std::size_t at) {
        const double x0 = t[i0], x1 = t[i0 + 1], x2 = t[i0 + 2], x = t[at];
        const double l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
        const double l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
        const double l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
        return l0 * y[i0] + l1 * y[i0 + 1] + l2 * y[i0 + 2];
    };
    out.values[0] = three_point(0, 0);
    for (std::size_t i = 1; i + 1 < n; ++i) out.values[i] = three_point(i - 1, i);
    out.values[n - 1] = three_point(n - 3, n - 1);
    return out;
}

}  // namespace

SampledFunction caputo_l1(const SampledFunction& g, double beta) {
    g.validate();
    detail::require(g.grid.size() >= 2, "caputo_l1 needs at least 2 grid points");
    detail::require(beta > 0.0 && beta <= 1.0, "caputo_l1 requires beta in (0,1]");
    if (beta == 1.0) return finite_difference_derivative(g);

    const std::size_t n_pts = g.grid.size();
    SampledFunction out{g.grid, std::vector<double>(n_pts, 0.0)};
    std::vector<double> dg(n_pts, 0.0);
    for (std::size_t k = 1; k < n_pts; ++k) dg[k] = g.values[k] - g.values[k - 1];
    for (std::size_t n = 1; n < n_pts; ++n) {
        const auto w = l1_weights(g.grid, n, beta);
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) acc += w[k - 1] * dg[k];
        out.values[n] = acc;
    }
    return out;
}

SampledFunction riemann_liouville_integral(const SampledFunction& g, double alpha) {
    g.validate();
    detail::require(alpha > 0.0, "riemann_liouville_integral requires alpha > 0");
    const std::size_t n_pts = g.grid.size();
    const double a1 = alpha + 1.0;
    const double norm = 1.0 / std::tgamma(alpha);
    SampledFunction out{g.grid, std::vector<double>(n_pts, 0.0)};
    for (std::size_t n = 1; n < n_pts; ++n) {
        const double tn = g.grid[n];
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double h = g.grid[k] - g.grid[k - 1];
            const double a = tn - g.grid[k];      // distance to right end
            const double b = tn - g.grid[k - 1];  // distance to left end
            const double pa = std::pow(a, alpha), pb = std::pow(b, alpha);
            const double qa = pa * a, qb = pb * b;
            // Integrals of u^(alpha-1) against the two hat functions, u = tn - tau.
            const double w_right = ((qb - qa) / a1 - a * (pb - pa) / alpha) / h;
            const double w_left = (b * (pb - pa) / alpha - (qb - qa) / a1) / h;
            acc += w_left * g.values[k - 1] + w_right * g.values[k];
        }
        out.values[n] = norm * acc;
    }
    return out;
}

}  // namespace tcgp

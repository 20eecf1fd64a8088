#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"
#include "tcgp/timechange.hpp"

namespace tcgp {

namespace {

constexpr double pi = std::numbers::pi;

// Tanh-sinh nodes on [0, tau*] carrying the clock density: the fine rule
// (step h) and its embedded coarse rule (step 2h) used for the error estimate.
struct ClockRule {
    std::vector<double> tau;
    std::vector<double> fine;    // h-weight times f_{E_t}(tau)
    std::vector<double> coarse;  // 2h-weight times f_{E_t}(tau), zero on odd nodes
};

double truncation_point(const SubordinatorSpec& sub, double t) {
    const double log_target = std::log(1e-10);
    double tau = 1.0 / sub.rho(Complex(1.0 / t)).real();
    for (int i = 0; i < 400 && inverse_time_log_tail_bound(sub, t, tau) > log_target; ++i) tau *= 1.25;
    return tau;
}

ClockRule clock_rule(const SubordinatorSpec& sub, double t, const Tolerances& tol) {
    const double tau_star = truncation_point(sub, t);
    const double h = 1.0 / 64.0;
    const int n = static_cast<int>(3.5 / h);
    ClockRule rule;
    std::vector<int> index;
    for (int k = -n; k <= n; ++k) {
        const double u = 0.5 * pi * std::sinh(k * h);
        const double tau = tau_star / (1.0 + std::exp(-2.0 * u));
        const double ch = std::cosh(u);
        const double w = tau_star * h * 0.25 * pi * std::cosh(k * h) / (ch * ch);
        if (!(tau > 0.0) || !(w > 0.0) || !(tau < tau_star)) continue;
        rule.tau.push_back(tau);
        rule.fine.push_back(w);
        rule.coarse.push_back(k % 2 == 0 ? 2.0 * w : 0.0);
    }
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(rule.tau.size());
    std::string failure;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        try {
            const double f = inverse_time_density(sub, t, rule.tau[i], tol);
            rule.fine[i] *= f;
            rule.coarse[i] *= f;
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericalError("subordinated density: " + failure);
    return rule;
}

Estimate apply_rule(const ClockRule& rule, const GaussianSpec& gauss, std::span<const double> x) {
    double fine = 0.0, coarse = 0.0;
    for (std::size_t i = 0; i < rule.tau.size(); ++i) {
        if (rule.fine[i] == 0.0) continue;
        const double p = std::exp(gaussian_log_density(gauss, rule.tau[i], x));
        fine += rule.fine[i] * p;
        coarse += rule.coarse[i] * p;
    }
    return {fine, std::abs(fine - coarse)};
}

void check_spec(const TimeChangedSpec& spec, std::span<const double> x) {
    spec.gauss.validate();
    detail::require(x.size() == spec.gauss.dimension(), "subordinated density: point dimension mismatch");
}

}  // namespace

double trapezoid(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size(), "trapezoid: size mismatch");
    double acc = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) acc += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    return acc;
}

void update_mass_error(GridDensity& density) {
    density.mass_error.resize(density.t_grid.size());
    for (std::size_t i = 0; i < density.t_grid.size(); ++i)
        density.mass_error[i] = std::abs(1.0 - trapezoid(density.x_grid, density.slice(i)));
}

Estimate subordinated_density_estimate(const TimeChangedSpec& spec, double t, std::span<const double> x,
                                       const Tolerances& tol) {
    check_spec(spec, x);
    if (!(t > 0.0)) throw DomainError("subordinated density requires t > 0");
    if (spec.sub.deterministic()) {
        const double w = spec.sub.components()[0].weight;
        return {gaussian_transition_density(spec.gauss, t / w, x), 0.0};
    }
    return apply_rule(clock_rule(spec.sub, t, tol), spec.gauss, x);
}

double subordinated_density(const TimeChangedSpec& spec, double t, std::span<const double> x,
                            const Tolerances& tol) {
    return subordinated_density_estimate(spec, t, x, tol).value;
}

GridDensity subordinated_density_grid(const TimeChangedSpec& spec, std::span<const double> t_grid,
                                      std::span<const double> x_grid, const Tolerances& tol) {
    detail::require(spec.gauss.dimension() == 1, "subordinated_density_grid: one-dimensional specs only");
    GridDensity out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.x_grid.assign(x_grid.begin(), x_grid.end());
    out.values.assign(t_grid.size() * x_grid.size(), 0.0);
    const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        detail::require(t > 0.0, "subordinated_density_grid: times must be > 0");
        ClockRule rule;
        if (!spec.sub.deterministic()) rule = clock_rule(spec.sub, t, tol);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < nx; ++k) {
            const double xk = x_grid[k];
            std::span<const double> point(&xk, 1);
            out.at(i, k) = spec.sub.deterministic()
                               ? gaussian_transition_density(spec.gauss, t / spec.sub.components()[0].weight, point)
                               : apply_rule(rule, spec.gauss, point).value;
        }
    }
    update_mass_error(out);
    return out;
}

double laplace_subordination_residual(const TimeChangedSpec& spec, double s, std::span<const double> x,
                                      const Tolerances& tol) {
    check_spec(spec, x);
    detail::require(s > 0.0, "laplace_subordination_residual requires s > 0");
    const std::vector<double> point(x.begin(), x.end());
    const auto lhs = laplace_forward(
        [&](double t) { return subordinated_density(spec, t, point, tol); }, Complex(s), 0.0, tol);
    const double r = spec.sub.rho(Complex(s)).real();
    const auto base = laplace_forward(
        [&](double tau) { return gaussian_transition_density(spec.gauss, tau, point); }, Complex(r), 0.0, tol);
    const double rhs = r / s * base.value.real();
    return std::abs(lhs.value.real() - rhs) / std::abs(lhs.value.real());
}

PathEnsemble sample_timechanged_paths(const TimeChangedSpec& spec, std::span<const double> grid,
                                      std::size_t n_paths, SeededRng seed, double op_step) {
    spec.gauss.validate();
    detail::require(n_paths >= 1, "sample_timechanged_paths: n_paths must be >= 1");
    detail::require(!grid.empty() && grid[0] == 0.0, "sample_timechanged_paths: grid must start at 0");
    const auto clock = sample_inverse_times(spec.sub, grid, n_paths, seed.master_seed, op_step);

    const std::size_t nt = grid.size(), d = spec.gauss.dimension();
    PathEnsemble out;
    out.grid.assign(grid.begin(), grid.end());
    out.n_paths = n_paths;
    out.dimension = d;
    out.seed = seed;
    out.values.assign(n_paths * nt * d, 0.0);

    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n_paths);
    std::string failure;
#pragma omp parallel
    {
        std::vector<double> times, cov, z;
        std::vector<std::size_t> slot(nt);
#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t p = 0; p < count; ++p) {
            try {
                // Distinct positive clock values; slot[i] = index of E_{t_i}, or -1 for 0.
                times.clear();
                for (std::size_t i = 0; i < nt; ++i) {
                    const double e = clock.at(p, i);
                    if (e <= 0.0) {
                        slot[i] = static_cast<std::size_t>(-1);
                        continue;
                    }
                    if (times.empty() || e > times.back() * (1.0 + 1e-13)) times.push_back(e);
                    slot[i] = times.size() - 1;
                }
                RandomStream rng({seed.master_seed ^ 0x9E3779B97F4A7C15ULL,
                                  seed.stream_index + static_cast<std::uint64_t>(p)});
                const std::size_t m = times.size();
                for (std::size_t j = 0; j < d; ++j) {
                    std::vector<double> x(m, 0.0);
                    if (m > 0) {
                        cov.assign(m * m, 0.0);
                        for (std::size_t a = 0; a < m; ++a)
                            for (std::size_t b = 0; b <= a; ++b)
                                cov[a * m + b] = cov[b * m + a] =
                                    covariance(spec.gauss.components[j], times[a], times[b]);
                        const auto l = cholesky_factor(cov, m);
                        z.resize(m);
                        for (auto& v : z) v = rng.normal();
                        for (std::size_t a = 0; a < m; ++a) {
                            double acc = 0.0;
                            for (std::size_t b = 0; b <= a; ++b) acc += l[a * m + b] * z[b];
                            x[a] = acc;
                        }
                    }
                    const MeanFunction* mean = spec.gauss.mean(j);
                    for (std::size_t i = 0; i < nt; ++i) {
                        const bool origin = slot[i] == static_cast<std::size_t>(-1);
                        const double e = origin ? 0.0 : times[slot[i]];
                        out.at(p, i, j) = (origin ? 0.0 : x[slot[i]]) + (mean ? mean->value(e) : 0.0);
                    }
                }
            } catch (const std::exception& e) {
#pragma omp critical
                failure = e.what();
            }
        }
    }
    if (!failure.empty()) throw NumericalError("sample_timechanged_paths: " + failure);
    return out;
}

namespace {

std::size_t grid_index(const PathEnsemble& ensemble, double t) {
    for (std::size_t i = 0; i < ensemble.grid.size(); ++i)
        if (std::abs(ensemble.grid[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    std::ostringstream msg;
    msg << "empirical_density: t=" << t << " is not on the ensemble grid";
    throw DomainError(msg.str());
}

}  // namespace

Histogram empirical_density(const PathEnsemble& ensemble, double t, std::size_t bins, std::size_t component) {
    const std::size_t i = grid_index(ensemble, t);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
        lo = std::min(lo, ensemble.at(p, i, component));
        hi = std::max(hi, ensemble.at(p, i, component));
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return empirical_density(ensemble, t, bins, lo, hi, component);
}

Histogram empirical_density(const PathEnsemble& ensemble, double t, std::size_t bins, double lo, double hi,
                            std::size_t component) {
    detail::require(bins >= 10, "empirical_density: at least 10 bins required");
    detail::require(hi > lo, "empirical_density: empty range");
    detail::require(component < ensemble.dimension, "empirical_density: component out of range");
    const std::size_t i = grid_index(ensemble, t);
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    h.counts.assign(bins, 0);
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
        const double v = ensemble.at(p, i, component);
        if (v < lo || v > hi) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * bins));
        ++h.counts[b];
        ++h.n_samples;
    }
    const double width = (hi - lo) / bins;
    h.density.resize(bins);
    h.standard_error.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double n = static_cast<double>(std::max<std::size_t>(h.n_samples, 1));
        const double q = h.counts[b] / n;
        h.density[b] = q / width;
        h.standard_error[b] = std::sqrt(q * (1.0 - q) / n) / width;
    }
    return h;
}

ChiSquare chi_square_test(const Histogram& hist, std::span<const double> bin_probabilities) {
    detail::require(bin_probabilities.size() == hist.counts.size(), "chi_square_test: one probability per bin");
    double total = 0.0;
    for (double p : bin_probabilities) {
        detail::require(p >= 0.0 && std::isfinite(p), "chi_square_test: invalid probability");
        total += p;
    }
    detail::require(total > 0.0, "chi_square_test: zero reference mass in range");
    const double n = static_cast<double>(hist.n_samples);
    std::vector<double> observed, expected;
    double o = 0.0, e = 0.0;
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        o += hist.counts[b];
        e += n * bin_probabilities[b] / total;
        if (e >= 5.0) {
            observed.push_back(o);
            expected.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (expected.empty()) {
            observed.push_back(o);
            expected.push_back(e);
        } else {
            observed.back() += o;
            expected.back() += e;
        }
    }
    ChiSquare out;
    for (std::size_t g = 0; g < observed.size(); ++g) {
        const double diff = observed[g] - expected[g];
        out.statistic += diff * diff / expected[g];
    }
    detail::require(observed.size() >= 2, "chi_square_test: fewer than two usable bins");
    out.dof = observed.size() - 1;
    const boost::math::chi_squared dist(static_cast<double>(out.dof));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

}  // namespace tcgp

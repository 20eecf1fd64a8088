#include "tcgp/subordinators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"
#include "stable_kernel.hpp"

namespace tcgp {

SubordinatorSpec::SubordinatorSpec(Kind kind, std::vector<StableComponent> components)
    : kind_(kind), components_(std::move(components)) {
    detail::require(!components_.empty(), "subordinator: at least one component required");
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto& c = components_[k];
        std::ostringstream where;
        where << "subordinator component " << k << ": ";
        detail::require(std::isfinite(c.weight) && c.weight > 0.0, where.str() + "weight must be > 0");
        const bool unit_ok = components_.size() == 1 && c.beta == 1.0;
        detail::require((c.beta > 0.0 && c.beta < 1.0) || unit_ok,
                        where.str() + "beta must lie in (0,1) (1 allowed for a single component)");
        for (std::size_t j = 0; j < k; ++j)
            detail::require(components_[j].beta != c.beta, where.str() + "duplicate beta");
    }
}

SubordinatorSpec SubordinatorSpec::stable(double beta, double weight) {
    return SubordinatorSpec(Kind::stable, {{beta, weight}});
}

SubordinatorSpec SubordinatorSpec::mixture(std::vector<StableComponent> components) {
    return SubordinatorSpec(Kind::mixture, std::move(components));
}

bool SubordinatorSpec::deterministic() const {
    return components_.size() == 1 && components_[0].beta == 1.0;
}

double SubordinatorSpec::single_beta() const {
    detail::require(components_.size() == 1, "subordinator: spec has several components");
    return components_[0].beta;
}

Complex SubordinatorSpec::rho(Complex s) const {
    Complex acc = 0.0;
    for (const auto& c : components_) acc += c.weight * std::pow(s, c.beta);
    return acc;
}

Complex SubordinatorSpec::m(Complex s) const {
    Complex num = 0.0, den = 0.0;
    for (const auto& c : components_) {
        const Complex p = c.weight * std::pow(s, c.beta);
        num += c.beta * p;
        den += p;
    }
    return num / den;
}

double sample_positive_stable(double beta, double scale, RandomStream& rng) {
    if (!(beta > 0.0 && beta < 1.0))
        throw DomainError("sample_positive_stable: beta must lie in (0,1)");
    if (!(scale > 0.0)) throw DomainError("sample_positive_stable: scale must be > 0");
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential();
    // sin(u) is recovered from the two partial angles (one sincos each).
    const double a = beta * u, b = u - a;
    const double sa = std::sin(a), ca = std::cos(a);
    const double sb = std::sin(b), cb = std::cos(b);
    const double su = sa * cb + ca * sb;
    const double log_s = (beta * std::log(sa / su) + (1.0 - beta) * std::log(sb / (su * e))) / beta;
    return scale == 1.0 ? std::exp(log_s) : std::pow(scale, 1.0 / beta) * std::exp(log_s);
}

namespace {

// Increment of W over an operational-time step h.
struct IncrementSampler {
    struct Part {
        double beta;
        double factor;  // (w h)^{1/beta}
    };
    std::vector<Part> parts;
    double drift = 0.0;

    IncrementSampler(const SubordinatorSpec& spec, double h) { reset(spec, h); }

    void reset(const SubordinatorSpec& spec, double h) {
        parts.clear();
        drift = 0.0;
        for (const auto& c : spec.components()) {
            if (c.beta == 1.0)
                drift += c.weight * h;
            else
                parts.push_back({c.beta, std::pow(c.weight * h, 1.0 / c.beta)});
        }
    }

    double draw(RandomStream& rng) const {
        double acc = drift;
        for (const auto& p : parts) acc += p.factor * sample_positive_stable(p.beta, 1.0, rng);
        return acc;
    }
};

// Scaled unit-stable draws produced in blocks by the vectorized kernel.
class StableBlock {
public:
    StableBlock(double beta, double factor) : beta_(beta), factor_(factor) {}

    double next(RandomStream& rng) {
        if (pos_ == size) refill(rng);
        return factor_ * draws_[pos_++];
    }

private:
    static constexpr std::size_t size = 64;

    void refill(RandomStream& rng) {
        for (std::size_t k = 0; k < size; ++k) {
            u_[k] = rng.uniform();
            v_[k] = rng.uniform();
        }
        detail::kanter_transform(size, beta_, u_.data(), v_.data(), draws_.data());
        pos_ = 0;
    }

    double beta_, factor_;
    std::array<double, size> u_{}, v_{}, draws_{};
    std::size_t pos_ = size;
};

void check_increasing_from_zero(std::span<const double> grid, const char* what) {
    if (grid.empty()) throw DomainError(std::string(what) + ": empty grid");
    if (grid[0] != 0.0) throw DomainError(std::string(what) + ": grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError(std::string(what) + ": grid must be strictly increasing");
}

}  // namespace

MonotonePath sample_subordinator_path(const SubordinatorSpec& spec, std::span<const double> grid,
                                      RandomStream& rng) {
    check_increasing_from_zero(grid, "sample_subordinator_path");
    MonotonePath path{std::vector<double>(grid.begin(), grid.end()),
                      std::vector<double>(grid.size(), 0.0)};
    IncrementSampler inc(spec, 1.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        inc.reset(spec, grid[i] - grid[i - 1]);
        path.values[i] = path.values[i - 1] + inc.draw(rng);
    }
    return path;
}

MonotonePath invert_subordinator_path(const MonotonePath& w, std::span<const double> t_grid) {
    if (w.grid.size() != w.values.size() || w.grid.empty())
        throw DomainError("invert_subordinator_path: malformed path");
    for (std::size_t i = 1; i < w.grid.size(); ++i) {
        if (w.values[i] < w.values[i - 1] || w.grid[i] < w.grid[i - 1])
            throw DomainError("invert_subordinator_path: path is not nondecreasing");
    }
    MonotonePath e{std::vector<double>(t_grid.begin(), t_grid.end()),
                   std::vector<double>(t_grid.size(), 0.0)};
    const double top = w.values.back();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (!(t >= 0.0) || !(t < top)) {
            std::ostringstream msg;
            msg << "invert_subordinator_path: t=" << t << " outside sampled range [0," << top << ")";
            throw DomainError(msg.str());
        }
        const auto it = std::upper_bound(w.values.begin(), w.values.end(), t);
        const std::size_t j = static_cast<std::size_t>(it - w.values.begin());
        if (j == 0) {
            e.values[i] = w.grid[0];
            continue;
        }
        const double w0 = w.values[j - 1], w1 = w.values[j];
        const double s0 = w.grid[j - 1], s1 = w.grid[j];
        e.values[i] = s0 + (t - w0) / (w1 - w0) * (s1 - s0);
    }
    for (std::size_t i = 1; i < e.values.size(); ++i)
        if (t_grid[i] >= t_grid[i - 1]) e.values[i] = std::max(e.values[i], e.values[i - 1]);
    return e;
}

InverseTimeEnsemble sample_inverse_times(const SubordinatorSpec& spec, std::span<const double> t_grid,
                                         std::size_t n_paths, std::uint64_t seed, double op_step) {
    detail::require(n_paths >= 1, "sample_inverse_times: n_paths must be >= 1");
    detail::require(op_step > 0.0, "sample_inverse_times: op_step must be > 0");
    detail::require(!t_grid.empty(), "sample_inverse_times: empty grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        detail::require(t_grid[i] >= 0.0, "sample_inverse_times: negative time");
        if (i > 0) detail::require(t_grid[i] > t_grid[i - 1], "sample_inverse_times: grid not increasing");
    }
    const std::size_t n_t = t_grid.size();
    InverseTimeEnsemble out{std::vector<double>(t_grid.begin(), t_grid.end()), n_paths,
                            std::vector<double>(n_paths * n_t, 0.0)};
    if (spec.deterministic()) {
        const double w = spec.components()[0].weight;
        for (std::size_t p = 0; p < n_paths; ++p)
            for (std::size_t i = 0; i < n_t; ++i) out.values[p * n_t + i] = t_grid[i] / w;
        return out;
    }
    const IncrementSampler inc(spec, op_step);
    const auto n = static_cast<long long>(n_paths);
#pragma omp parallel for schedule(dynamic, 256)
    for (long long p = 0; p < n; ++p) {
        RandomStream rng({seed, static_cast<std::uint64_t>(p)});
        std::vector<StableBlock> blocks;
        for (const auto& part : inc.parts) blocks.emplace_back(part.beta, part.factor);
        double* row = out.values.data() + static_cast<std::size_t>(p) * n_t;
        double s = 0.0, w = 0.0;
        std::size_t i = 0;
        while (i < n_t) {
            double dw = inc.drift;
            for (auto& b : blocks) dw += b.next(rng);
            const double wn = w + dw;
            while (i < n_t && t_grid[i] < wn) {
                row[i] = s + (t_grid[i] - w) / dw * op_step;
                ++i;
            }
            s += op_step;
            w = wn;
        }
    }
    return out;
}

namespace {

void check_time(double t) {
    if (!(t > 0.0)) throw DomainError("inverse-time law requires t > 0");
}

double clamp_density(double v, double floor, double t, double tau) {
    if (v >= 0.0) return v;
    if (v > -floor) return 0.0;
    std::ostringstream msg;
    msg << "inverse_time_density: negative value " << v << " at t=" << t << ", tau=" << tau;
    throw NumericalError(msg.str());
}

}  // namespace

// Chernoff bound P(E_t > tau) = P(W_tau < t) <= min_s exp(s t - tau rho(s)).
// The exponent is convex in s; its minimizer solves tau rho'(s) = t.
double inverse_time_log_tail_bound(const SubordinatorSpec& spec, double t, double tau) {
    detail::require(!spec.deterministic(), "tail bound: E_t is deterministic for beta = 1");
    auto rho_prime = [&](double s) {
        double acc = 0.0;
        for (const auto& c : spec.components()) acc += c.weight * c.beta * std::pow(s, c.beta - 1.0);
        return acc;
    };
    double lo = -700.0, hi = 700.0;  // bracket in log s; rho' decreases in s
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tau * rho_prime(std::exp(mid)) > t)
            lo = mid;
        else
            hi = mid;
    }
    const double s = std::exp(0.5 * (lo + hi));
    return std::min(0.0, s * t - tau * spec.rho(Complex(s)).real());
}

namespace {

// The density is unimodal, and a tail mass this small puts tau beyond the
// mode, so f(tau) <= P(E_t > (1-d) tau) / (d tau). Values bounded below
// 1e-40 are returned as exact zeros; the inversions cannot resolve them.
bool negligible_density(const SubordinatorSpec& spec, double t, double tau) {
    const double d = 0.05;
    if (tau <= 0.0) return false;
    const double log_bound = inverse_time_log_tail_bound(spec, t, (1.0 - d) * tau) - std::log(d * tau);
    return log_bound < std::log(1e-40);
}

}  // namespace

double inverse_time_density(const SubordinatorSpec& spec, double t, double tau, const Tolerances& tol) {
    check_time(t);
    detail::require(tau >= 0.0, "inverse_time_density requires tau >= 0");
    if (spec.deterministic())
        throw DomainError("inverse_time_density: E_t is deterministic for beta = 1");
    if (negligible_density(spec, t, tau)) return 0.0;
    LaplaceFunction F;
    F.abscissa = 0.0;
    F.cut_plane_analytic = true;
    if (spec.kind() == SubordinatorSpec::Kind::stable) {
        const double beta = spec.single_beta();
        const double w = spec.components()[0].weight;
        F.image = [=](Complex s) {
            const Complex sb = std::pow(s, beta);
            return w * sb / s * std::exp(-tau * w * sb);
        };
    } else {
        F.image = [&spec, tau](Complex s) {
            const Complex r = spec.rho(s);
            return r / s * std::exp(-tau * r);
        };
    }
    // Densities peak at about rho(1/t); agreement is judged on that scale.
    const double scale = spec.rho(Complex(1.0 / t)).real();
    return clamp_density(laplace_inverse(F, t, tol, scale), tol.density_floor * std::max(1.0, scale), t, tau);
}

double inverse_time_cdf(const SubordinatorSpec& spec, double t, double tau, const Tolerances& tol) {
    check_time(t);
    detail::require(tau >= 0.0, "inverse_time_cdf requires tau >= 0");
    if (spec.deterministic()) return tau >= t / spec.components()[0].weight ? 1.0 : 0.0;
    if (tau == 0.0) return 0.0;
    if (inverse_time_log_tail_bound(spec, t, tau) < std::log(1e-40)) return 1.0;
    LaplaceFunction F;
    F.image = [&spec, tau](Complex s) { return std::exp(-tau * spec.rho(s)) / s; };
    const double v = 1.0 - laplace_inverse(F, t, tol);
    return std::clamp(v, 0.0, 1.0);
}

double inverse_time_moment(const SubordinatorSpec& spec, double t, double gamma, const Tolerances& tol) {
    check_time(t);
    detail::require(gamma > 0.0, "inverse_time_moment requires gamma > 0");
    if (spec.deterministic()) return std::pow(t / spec.components()[0].weight, gamma);
    if (spec.kind() == SubordinatorSpec::Kind::stable) {
        const double beta = spec.single_beta();
        const double w = spec.components()[0].weight;
        return std::tgamma(gamma + 1.0) * std::pow(t, gamma * beta) /
               (std::pow(w, gamma) * std::tgamma(gamma * beta + 1.0));
    }
    LaplaceFunction F;
    const double g1 = std::tgamma(gamma + 1.0);
    F.image = [&spec, gamma, g1](Complex s) { return g1 / (s * std::pow(spec.rho(s), gamma)); };
    return laplace_inverse(F, t, tol);
}

}  // namespace tcgp

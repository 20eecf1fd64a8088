#pragma once

// Stable subordinators, finite mixtures of them, and their inverses.

#include <span>
#include <vector>

#include "tcgp/numerics.hpp"
#include "tcgp/random.hpp"

namespace tcgp {

struct StableComponent {
    double beta = 0.5;
    double weight = 1.0;
};

/// A stable subordinator (Laplace exponent w*s^beta) or a finite mixture of
/// independent ones (Laplace exponent sum_k w_k s^{beta_k}).
///
/// The kind is kept explicitly so that a one-component mixture is evaluated
/// through the general mixture routes; pure-stable specs may use closed forms.
/// beta == 1 is accepted only for a single component and denotes the
/// deterministic clock W_t = w t.
class SubordinatorSpec {
public:
    enum class Kind { stable, mixture };

    static SubordinatorSpec stable(double beta, double weight = 1.0);
    static SubordinatorSpec mixture(std::vector<StableComponent> components);

    Kind kind() const { return kind_; }
    const std::vector<StableComponent>& components() const { return components_; }

    /// Single component with beta == 1.
    bool deterministic() const;
    /// beta of a single-component spec (either kind).
    double single_beta() const;

    /// Laplace exponent rho(s) on the principal branch.
    Complex rho(Complex s) const;
    /// m(s) = s rho'(s) / rho(s); identically beta for one component.
    Complex m(Complex s) const;

private:
    SubordinatorSpec(Kind kind, std::vector<StableComponent> components);
    Kind kind_;
    std::vector<StableComponent> components_;
};

/// Sampled nondecreasing path. For W the grid is operational time and the
/// values calendar time; for E the roles swap. Repeated grid points encode
/// exact jumps.
struct MonotonePath {
    std::vector<double> grid;
    std::vector<double> values;
};

/// One draw with Laplace transform exp(-scale * s^beta), beta in (0,1),
/// by the Kanter / Chambers-Mallows-Stuck construction.
double sample_positive_stable(double beta, double scale, RandomStream& rng);

/// W on `grid` (strictly increasing from 0) as a sum of independent
/// component increments (w_k dt)^{1/beta_k} S_k.
MonotonePath sample_subordinator_path(const SubordinatorSpec& spec, std::span<const double> grid,
                                      RandomStream& rng);

/// E_t = inf{s : W_s > t} with linear interpolation inside grid cells.
MonotonePath invert_subordinator_path(const MonotonePath& w, std::span<const double> t_grid);

/// Inverse-time values for many paths on a shared calendar grid.
struct InverseTimeEnsemble {
    std::vector<double> t_grid;
    std::size_t n_paths = 0;
    std::vector<double> values;  // row-major, n_paths x t_grid.size()

    double at(std::size_t path, std::size_t i) const { return values[path * t_grid.size() + i]; }
};

/// Simulates W with operational step `op_step` until it passes max(t_grid)
/// and inverts it on the fly. Path p uses stream (seed, p), so results do not
/// depend on the thread count.
InverseTimeEnsemble sample_inverse_times(const SubordinatorSpec& spec, std::span<const double> t_grid,
                                         std::size_t n_paths, std::uint64_t seed,
                                         double op_step = 1e-3);

/// Density f_{E_t}(tau) by Laplace inversion in t.
double inverse_time_density(const SubordinatorSpec& spec, double t, double tau,
                            const Tolerances& tol = {});

/// P(E_t <= tau) = 1 - L^{-1}[exp(-tau rho(s)) / s](t).
double inverse_time_cdf(const SubordinatorSpec& spec, double t, double tau,
                        const Tolerances& tol = {});

/// log of the Chernoff bound on P(E_t > tau). Not defined for beta = 1.
double inverse_time_log_tail_bound(const SubordinatorSpec& spec, double t, double tau);

/// E[(E_t)^gamma]. Closed form for the stable kind, Laplace inversion for mixtures.
double inverse_time_moment(const SubordinatorSpec& spec, double t, double gamma,
                           const Tolerances& tol = {});

}  // namespace tcgp

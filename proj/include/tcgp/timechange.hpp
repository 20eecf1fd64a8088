#pragma once

// Gaussian processes run on the clock of an inverse subordinator.

#include <span>
#include <vector>

#include "tcgp/gaussian.hpp"
#include "tcgp/grid_density.hpp"
#include "tcgp/subordinators.hpp"

namespace tcgp {

/// X_{E_t} with X and E independent.
struct TimeChangedSpec {
    GaussianSpec gauss;
    SubordinatorSpec sub = SubordinatorSpec::stable(0.5);
};

/// Samples E on `grid` (subordinators module, streams (seed.master_seed, p)),
/// then X exactly at the times {E_{t_i}} of each path. Equal clock values
/// share one Gaussian value.
PathEnsemble sample_timechanged_paths(const TimeChangedSpec& spec, std::span<const double> grid,
                                      std::size_t n_paths, SeededRng seed, double op_step = 1e-3);

/// q(t,x) = int_0^inf f_{E_t}(tau) p(tau,x) dtau, truncated where the
/// Chernoff bound on the clock's tail mass drops below 1e-10.
Estimate subordinated_density_estimate(const TimeChangedSpec& spec, double t, std::span<const double> x,
                                       const Tolerances& tol = {});

double subordinated_density(const TimeChangedSpec& spec, double t, std::span<const double> x,
                            const Tolerances& tol = {});

/// q on a grid for one-dimensional specs; t_grid entries must be > 0.
GridDensity subordinated_density_grid(const TimeChangedSpec& spec, std::span<const double> t_grid,
                                      std::span<const double> x_grid, const Tolerances& tol = {});

/// |q~(s,x) - (rho(s)/s) p~(rho(s),x)| / |q~(s,x)| with both transforms
/// computed by laplace_forward.
double laplace_subordination_residual(const TimeChangedSpec& spec, double s, std::span<const double> x,
                                      const Tolerances& tol = {});

struct Histogram {
    std::vector<double> edges;
    std::vector<double> density;         // normalized over the samples in range
    std::vector<double> standard_error;  // binomial MC error of each density value
    std::vector<std::size_t> counts;
    std::size_t n_samples = 0;           // samples inside [edges.front(), edges.back()]
};

/// Histogram of component `component` at grid time t (must be a grid point).
/// Without an explicit range the bins span the sample minimum and maximum.
Histogram empirical_density(const PathEnsemble& ensemble, double t, std::size_t bins,
                            std::size_t component = 0);
Histogram empirical_density(const PathEnsemble& ensemble, double t, std::size_t bins, double lo, double hi,
                            std::size_t component = 0);

struct ChiSquare {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson test of histogram counts against reference bin probabilities
/// (renormalized over the histogram range). Bins with expected count below
/// 5 are merged with their neighbours.
ChiSquare chi_square_test(const Histogram& hist, std::span<const double> bin_probabilities);

}  // namespace tcgp

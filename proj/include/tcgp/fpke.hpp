#pragma once

// Finite-difference solvers for classical, time-fractional and
// distributed-order Fokker-Planck-Kolmogorov equations in one space dimension.

#include <functional>
#include <vector>

#include "tcgp/gaussian.hpp"
#include "tcgp/grid_density.hpp"
#include "tcgp/subordinators.hpp"

namespace tcgp {

/// A time-dependent coefficient c(t) together with C(t) = int_0^t c.
/// Steps use exact increments of C, so integrable singularities at t = 0
/// and kinks at breakpoints cost no accuracy.
struct Coefficient {
    std::function<double(double)> value;
    std::function<double(double)> integral;
    std::vector<double> breakpoints;

    static Coefficient constant(double c);
};

/// Spatial operator of a 1-D FPKE, in flux form.
///   scaled_laplacian:      theta(t) d2/dx2
///   ou_generator:          (sigma^2/2) d2/dx2 + alpha d/dx (x .)
///   diffusion_with_drift:  theta(t) d2/dx2 - m'(t) d/dx
class SpatialOperator {
public:
    enum class Kind { scaled_laplacian, ou_generator, diffusion_with_drift };

    static SpatialOperator scaled_laplacian(double theta);
    static SpatialOperator scaled_laplacian(Coefficient theta);
    static SpatialOperator ou_generator(double alpha, double sigma);
    static SpatialOperator diffusion_with_drift(Coefficient theta, Coefficient drift);

    /// The marginal equation of a Gaussian process with
    /// variance R(t) and mean m(t): theta = R'/2, drift = m'. Breakpoints of
    /// piecewise-Hurst models are carried along.
    static SpatialOperator from_model(const CovarianceModel& model, const MeanFunction& mean = {});

    Kind kind() const { return kind_; }
    /// True when the coefficients do not depend on t.
    bool autonomous() const { return autonomous_; }
    const Coefficient& theta() const { return theta_; }
    const Coefficient& drift() const { return drift_; }
    double alpha() const { return alpha_; }
    double sigma() const { return sigma_; }
    /// Location of the initial point mass.
    double origin() const { return origin_; }

private:
    Kind kind_ = Kind::scaled_laplacian;
    bool autonomous_ = true;
    Coefficient theta_;
    Coefficient drift_;
    double alpha_ = 0.0;
    double sigma_ = 0.0;
    double origin_ = 0.0;
};

struct SolverConfig {
    double t_max = 1.0;
    std::size_t n_t = 400;
    double x_min = -12.0;
    double x_max = 12.0;
    std::size_t n_x = 400;
    /// Standard deviation of the Gaussian standing in for the initial point
    /// mass. Zero selects the lattice point mass (mass 1/dx split linearly
    /// between the nodes around the origin).
    double init_width = 0.0;
    /// Extra time nodes (e.g. Hurst breakpoints) forced onto the grid.
    std::vector<double> breakpoints;
    Tolerances tol;

    double dx() const { return (x_max - x_min) / static_cast<double>(n_x - 1); }
    /// Throws DomainError on invalid grids or widths.
    void validate() const;
};

/// Crank-Nicolson (with two implicit-Euler half steps at start) for
/// dp/dt = A(t) p. Breakpoints of the operator and of the config are grid nodes.
GridDensity solve_classical(const SpatialOperator& op, const SolverConfig& cfg);

/// Implicit L1 scheme for D^beta q = A q on a uniform time grid.
/// beta == 1 dispatches to solve_classical. Requires an autonomous operator.
GridDensity solve_fractional(const SpatialOperator& op, double beta, const SolverConfig& cfg);

/// Implicit L1 scheme for sum_k w_k D^{beta_k} q = A q.
GridDensity solve_distributed_order(const SpatialOperator& op, const SubordinatorSpec& spec,
                                    const SolverConfig& cfg);

/// An FPKE: D^mu q = A q with mu given by `clock` (the deterministic clock
/// stable(1) gives the classical equation).
struct FpkeEquation {
    SpatialOperator op;
    SubordinatorSpec clock = SubordinatorSpec::stable(1.0);
};

struct SliceResidual {
    double t = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

/// Discrete residual of `equation` on `density`: caputo_l1 (or second-order
/// differences for d/dt) in time, central differences in x, boundary bands of
/// max(2, n_x/20) points excluded. One entry per slice n >= 1 whose
/// coefficients are defined. Throws DomainError below 16 interior points.
std::vector<SliceResidual> residual_norm(const GridDensity& density, const FpkeEquation& equation);

}  // namespace tcgp

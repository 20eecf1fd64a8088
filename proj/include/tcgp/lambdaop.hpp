#pragma once

// Time-nonlocal operators G^beta_gamma and Lambda of time-changed FPKEs.

#include <functional>
#include <memory>
#include <vector>

#include "tcgp/fpke.hpp"
#include "tcgp/fraccalc.hpp"
#include "tcgp/gaussian.hpp"
#include "tcgp/grid_density.hpp"
#include "tcgp/subordinators.hpp"

namespace tcgp {

/// Operand of an operator: either an analytic Laplace image g~(z), analytic
/// for Re z > abscissa, or samples of g on a grid from 0.
class TransformableInput {
public:
    static TransformableInput analytic(std::function<Complex(Complex)> image, double abscissa = 0.0);
    static TransformableInput sampled(SampledFunction g);

    bool is_sampled() const { return sampled_ != nullptr; }
    const SampledFunction& samples() const;
    double abscissa() const { return abscissa_; }
    /// g~(z); for samples, the exact transform of the piecewise-linear interpolant.
    Complex image(Complex z) const;

private:
    std::function<Complex(Complex)> image_;
    std::shared_ptr<const SampledFunction> sampled_;
    double abscissa_ = 0.0;
};

/// G^beta_gamma g = beta Gamma(gamma+1) J^{1-beta} L^{-1}[ (1/2 pi i) int_C g~(z) (s^beta - z^beta)^{-gamma-1} dz ]
///
/// Lambda g = (1/2) L^{-1}[ (1/2 pi i) int_C (rho(s)-rho(z)) R~(rho(s)-rho(z)) m(z) g~(z) dz ]
/// with rho, m of the subordinator (rho = z^beta, m = beta for a stable one).
///
/// The contour is the vertical line Re z = a + contour_fraction (Re s - a),
/// a = max(0, abscissa of g~), integrated over the whole line by
/// double-exponential quadrature.
struct OperatorSpec {
    enum class Kind { G, Lambda };

    Kind kind = Kind::G;
    double beta = 0.5;
    double gamma = 0.0;
    SubordinatorSpec sub = SubordinatorSpec::stable(0.5);
    std::shared_ptr<const CovarianceModel> model;
    double contour_fraction = 0.5;
    /// Minimal admissible distance Re s - a between contour base and s.
    double margin = 1e-8;
    /// Order of an extra Riemann-Liouville integral applied to the result.
    double outer_integral = 0.0;
    Tolerances tol;

    static OperatorSpec G(double beta, double gamma);
    static OperatorSpec Lambda(SubordinatorSpec sub, const CovarianceModel& model);

    /// Throws DomainError: G needs beta in (0,1], gamma in (-1,1); Lambda needs
    /// a model with closed-form variance transform.
    void validate() const;
};

/// G^beta_gamma g at t > 0. Analytic operands use the contour formula with
/// checked Laplace inversion; sampled operands use apply_G and linear
/// interpolation. The error combines inversion disagreement and inner
/// quadrature error.
Estimate eval_G(const OperatorSpec& spec, const TransformableInput& g, double t);

/// Lambda g at t > 0 for analytic operands.
Estimate eval_Lambda(const OperatorSpec& spec, const TransformableInput& g, double t);

/// G^beta_gamma applied to samples, at every grid point, through the
/// factorization G = J_t^{beta gamma} o EK, EK h = D_v^gamma[v^gamma h] in
/// v = t^beta (fractional parts by the L1 and product-integration rules of
/// fraccalc; for gamma < 0, J^{beta gamma} is the Riemann-Liouville
/// derivative of order -beta gamma). beta == 1 is multiplication by t^gamma.
/// The value at t = 0 is the limit when finite (gamma >= 0) and NaN otherwise.
SampledFunction apply_G(double beta, double gamma, const SampledFunction& g);

/// Pointwise residual D^beta q - H G^beta_{2H-1} d2q/dx2 on interior points
/// (boundary bands of max(2, n_x/20) excluded), for slices n >= 1.
struct ResidualField {
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::vector<double> values;  // row-major t x x
    std::vector<SliceResidual> slices;
};

/// Residual of the time-changed fBm FPKE on a density grid. `spec` must be a
/// single stable component. Throws DomainError for H outside (0,1), mixtures,
/// or grids with fewer than 16 interior points.
ResidualField fbm_fpke_residual(double hurst, const SubordinatorSpec& spec, const GridDensity& density);

}  // namespace tcgp

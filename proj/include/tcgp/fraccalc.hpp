#pragma once

// Fractional calculus and Laplace-transform primitives.

#include <functional>
#include <span>
#include <vector>

#include "tcgp/numerics.hpp"

namespace tcgp {

/// Samples of a real function of time on a grid starting at zero.
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;

    /// Throws DomainError unless the grid starts at 0, is strictly increasing,
    /// and matches `values` in length with finite entries.
    void validate() const;
};

/// L1 weights of the Caputo derivative at node `n` of `grid`:
/// D^beta g(t_n) ~ sum_{k=1}^{n} w[k-1] * (g_k - g_{k-1}).
/// The weights include the 1/Gamma(2-beta) factor. Requires beta in (0,1).
std::vector<double> l1_weights(std::span<const double> grid, std::size_t n, double beta);

/// Caputo derivative of order beta in (0,1] by the L1 scheme on a
/// (possibly nonuniform) grid. For beta == 1 returns the second-order
/// finite-difference derivative.
SampledFunction caputo_l1(const SampledFunction& g, double beta);

/// Riemann-Liouville integral J^alpha by product integration of the
/// piecewise-linear interpolant against the exact kernel (t-tau)^(alpha-1).
SampledFunction riemann_liouville_integral(const SampledFunction& g, double alpha);

/// Mittag-Leffler function E_alpha(z) for alpha in (0,1] and real z.
double mittag_leffler(double alpha, double z);

/// A Laplace image F(s) analytic for Re s > abscissa.
///
/// `cut_plane_analytic` states that F continues analytically to the plane
/// cut along (-inf, abscissa]; only then may contour-deforming inversion
/// (Talbot) be used. Otherwise F is only trusted on vertical lines.
struct LaplaceFunction {
    std::function<Complex(Complex)> image;
    double abscissa = 0.0;
    bool cut_plane_analytic = true;
};

/// Laplace transform of a real callback g on [0, inf).
/// Adaptive quadrature; the returned error is the quadrature error estimate.
/// Throws DomainError if Re s <= abscissa, NumericalError on nonconvergence.
ComplexEstimate laplace_forward(const std::function<double(double)>& g, Complex s,
                                double abscissa = 0.0, const Tolerances& tol = {});

/// Laplace transform of sampled data: exact transform of the piecewise-linear
/// interpolant, continued as a constant beyond the last grid point.
ComplexEstimate laplace_forward(const SampledFunction& g, Complex s);

/// Individual inversion algorithms. Each returns f(t) for F = L[f].
double invert_talbot(const LaplaceFunction& F, double t, int nodes);
double invert_de_hoog(const LaplaceFunction& F, double t, int degree, double tolerance);
double invert_cohen(const LaplaceFunction& F, double t, int terms, double digits);

struct InversionResult {
    double value = 0.0;
    double disagreement = 0.0;  // |primary - secondary|
};

/// Inverse Laplace transform accepted only when two independent algorithms
/// agree within tol.inversion_agreement. The returned value is de Hoog's.
/// Cut-plane-analytic images are checked against fixed Talbot; if Talbot
/// disagrees, or the image is only valid on vertical lines, the check is
/// Cohen's accelerated Fourier series. Throws NumericalError when no pair agrees.
///
/// Agreement means |a - b| <= tol.inversion_agreement * max(scale, |a|);
/// `scale` is the natural magnitude of f near t (1 for O(1) functions).
InversionResult laplace_inverse_checked(const LaplaceFunction& F, double t,
                                        const Tolerances& tol = {}, double scale = 1.0);

double laplace_inverse(const LaplaceFunction& F, double t, const Tolerances& tol = {},
                       double scale = 1.0);

}  // namespace tcgp

#pragma once

// Zero-mean Gaussian process models, path sampling and transition densities.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tcgp/numerics.hpp"
#include "tcgp/random.hpp"

namespace tcgp {

/// Deterministic Hurst function H(t) with an analytic derivative.
class HurstFunction {
public:
    enum class Kind { constant, polynomial, saturating };

    static HurstFunction constant(double h);
    /// H(t) = sum_k c_k t^k.
    static HurstFunction polynomial(std::vector<double> coefficients);
    /// H(t) = h0 + amplitude * t / (scale + t).
    static HurstFunction saturating(double h0, double amplitude, double scale);

    Kind kind() const { return kind_; }
    const std::vector<double>& parameters() const { return params_; }

    double value(double t) const;
    double derivative(double t) const;

private:
    HurstFunction(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}
    Kind kind_;
    std::vector<double> params_;
};

/// Laplace data of a variance function: R~(s) and R'~(s) = s R~(s).
struct VarianceLaplace {
    Complex variance;
    Complex derivative;
};

class CovarianceModel;

struct MixedTerm {
    double coefficient = 1.0;
    std::shared_ptr<const CovarianceModel> model;
};

/// Tagged covariance family. Instances are immutable and cheap to copy.
class CovarianceModel {
public:
    enum class Kind { brownian, fbm, mixed, ou, variable_hurst, piecewise_hurst };

    static CovarianceModel brownian();
    static CovarianceModel fbm(double hurst);
    /// X = sum_l a_l X_l with independent parts.
    static CovarianceModel mixed(std::vector<MixedTerm> terms);
    static CovarianceModel ou(double alpha, double sigma);
    /// Volterra process with kernel K_{H(t)}; H must stay in (1/2,1) on
    /// [0, horizon], which is checked on a sample of points.
    static CovarianceModel variable_hurst(HurstFunction hurst, double horizon);
    /// Telescoping fBm increments with Hurst index hursts[k] on
    /// [breakpoints[k], breakpoints[k+1]); breakpoints[0] must be 0.
    static CovarianceModel piecewise_hurst(std::vector<double> breakpoints, std::vector<double> hursts);

    Kind kind() const { return kind_; }
    double hurst() const { return hurst_; }
    double alpha() const { return alpha_; }
    double sigma() const { return sigma_; }
    double horizon() const { return horizon_; }
    const std::vector<MixedTerm>& terms() const { return terms_; }
    const HurstFunction& hurst_function() const { return *hurst_fn_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& hursts() const { return hursts_; }

    /// Variance R(t) = R(t,t) has a closed-form Laplace image (brownian, fbm,
    /// ou and mixtures of those).
    bool closed_form_laplace() const;

private:
    explicit CovarianceModel(Kind kind) : kind_(kind) {}
    Kind kind_;
    double hurst_ = 0.5;
    double alpha_ = 0.0;
    double sigma_ = 1.0;
    double horizon_ = 0.0;
    std::vector<MixedTerm> terms_;
    std::shared_ptr<const HurstFunction> hurst_fn_;
    std::vector<double> breakpoints_;
    std::vector<double> hursts_;
};

/// R(s,t). Throws DomainError for negative times or times beyond a
/// variable-Hurst horizon; NumericalError on quadrature failure.
double covariance(const CovarianceModel& model, double s, double t, const Tolerances& tol = {});

/// R(t) = R(t,t) for t >= 0, in closed form for every kind (t^{2H(t)} for
/// the variable-Hurst model).
double variance(const CovarianceModel& model, double t);

/// (R(t), R'(t)) for t > 0. Throws DomainError at a piecewise breakpoint.
std::pair<double, double> variance_and_derivative(const CovarianceModel& model, double t);

/// R~(s) and R'~(s): closed forms where available, continued analytically to
/// the plane cut along (-inf, 0]; otherwise laplace_forward of the variance and
/// of its derivative, which needs Re s > 0.
VarianceLaplace variance_laplace(const CovarianceModel& model, Complex s, const Tolerances& tol = {});

/// Covariance matrix on `grid`, row-major.
std::vector<double> covariance_matrix(const CovarianceModel& model, std::span<const double> grid,
                                      const Tolerances& tol = {});

/// c_H making the kernel K_H reproduce the fBm covariance, calibrated at
/// s = t = 1 and verified at (1, 2). Requires H in (1/2, 1).
double calibrate_volterra_constant(double hurst, const Tolerances& tol = {});

/// K_H(t, r) with the calibrated constant, for 0 < r < t.
double volterra_kernel(double hurst, double t, double r, const Tolerances& tol = {});

/// Polynomial mean m(t) = sum_k c_k t^k; empty means zero.
struct MeanFunction {
    std::vector<double> coefficients;

    double value(double t) const;
    double derivative(double t) const;
    bool zero() const;
};

/// n-dimensional process with independent components.
struct GaussianSpec {
    std::vector<CovarianceModel> components;
    std::vector<MeanFunction> means;  // empty, or one per component

    static GaussianSpec isotropic(const CovarianceModel& model, std::size_t dimension = 1);

    std::size_t dimension() const { return components.size(); }
    const MeanFunction* mean(std::size_t j) const { return means.empty() ? nullptr : &means[j]; }
    void validate() const;
};

/// Paths on a shared grid; values are row-major (path, time, component).
struct PathEnsemble {
    std::vector<double> grid;
    std::size_t n_paths = 0;
    std::size_t dimension = 1;
    std::vector<double> values;
    SeededRng seed;

    double at(std::size_t path, std::size_t i, std::size_t j = 0) const {
        return values[(path * grid.size() + i) * dimension + j];
    }
    double& at(std::size_t path, std::size_t i, std::size_t j = 0) {
        return values[(path * grid.size() + i) * dimension + j];
    }
};

/// Lower Cholesky factor (row-major) of a covariance matrix. Adds diagonal
/// jitter up to 1e-10 * trace if needed; throws NumericalError beyond that.
std::vector<double> cholesky_factor(std::vector<double> matrix, std::size_t n);

/// Exact joint sampling on `grid` (strictly increasing, starting at 0).
/// Path p draws from stream (seed.master_seed, seed.stream_index + p).
/// Piecewise-Hurst models are sampled by their increment construction.
PathEnsemble sample_gaussian_paths(const GaussianSpec& spec, std::span<const double> grid,
                                   std::size_t n_paths, SeededRng seed);

/// log p(t, x) for t > 0. Throws DomainError if t <= 0 (the law is the
/// point mass at the mean) or if a component variance vanishes.
double gaussian_log_density(const GaussianSpec& spec, double t, std::span<const double> x);

double gaussian_transition_density(const GaussianSpec& spec, double t, std::span<const double> x);

}  // namespace tcgp

#include "tcgp/lambdaop.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tcgp/errors.hpp"

namespace tcgp {

TransformableInput TransformableInput::analytic(std::function<Complex(Complex)> image, double abscissa) {
    detail::require(static_cast<bool>(image), "TransformableInput: empty image");
    detail::require(std::isfinite(abscissa), "TransformableInput: abscissa must be finite");
    TransformableInput in;
    in.image_ = std::move(image);
    in.abscissa_ = abscissa;
    return in;
}

TransformableInput TransformableInput::sampled(SampledFunction g) {
    g.validate();
    TransformableInput in;
    in.sampled_ = std::make_shared<const SampledFunction>(std::move(g));
    in.abscissa_ = 0.0;
    return in;
}

const SampledFunction& TransformableInput::samples() const {
    if (!sampled_) throw DomainError("TransformableInput: operand is not sampled");
    return *sampled_;
}

Complex TransformableInput::image(Complex z) const {
    if (sampled_) return laplace_forward(*sampled_, z).value;
    return image_(z);
}

OperatorSpec OperatorSpec::G(double beta, double gamma) {
    OperatorSpec spec;
    spec.kind = Kind::G;
    spec.beta = beta;
    spec.gamma = gamma;
    spec.validate();
    return spec;
}

OperatorSpec OperatorSpec::Lambda(SubordinatorSpec sub, const CovarianceModel& model) {
    OperatorSpec spec;
    spec.kind = Kind::Lambda;
    spec.sub = std::move(sub);
    spec.beta = spec.sub.components().size() == 1 ? spec.sub.single_beta() : 0.0;
    spec.model = std::make_shared<const CovarianceModel>(model);
    spec.validate();
    return spec;
}

void OperatorSpec::validate() const {
    detail::require(contour_fraction > 0.0 && contour_fraction < 1.0, "operator: contour_fraction must be in (0,1)");
    detail::require(margin > 0.0, "operator: margin must be > 0");
    detail::require(outer_integral >= 0.0, "operator: outer_integral must be >= 0");
    if (kind == Kind::G) {
        detail::require(beta > 0.0 && beta <= 1.0, "operator G: beta must be in (0,1]");
        detail::require(gamma > -1.0 && gamma < 1.0, "operator G: gamma must be in (-1,1)");
        return;
    }
    detail::require(model != nullptr, "operator Lambda: missing covariance model");
    detail::require(model->closed_form_laplace(),
                    "operator Lambda: the covariance model needs a closed-form variance transform");
    detail::require(!sub.deterministic(), "operator Lambda: the subordinator must be random");
}

namespace {

struct LineIntegral {
    Complex value;
    double relative_error;
};

// (1/2 pi i) int over Re z = C of f(z) dz = (1/2 pi) int_R f(C + iy) dy.
// The integrand peaks near y = Im s, at distance Re s - C from the line, so
// each half-line is split there: adaptive Gauss-Kronrod up to just past the
// peak, double-exponential quadrature on the algebraically decaying tail.
template <class F>
LineIntegral line_integral(F&& f, double c, Complex s, const Tolerances& tol) {
    thread_local boost::math::quadrature::exp_sinh<double> tail_rule;
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double width = s.real() - c;
    Complex total = 0.0;
    double err = 0.0, l1 = 0.0;
    for (const double sign : {1.0, -1.0}) {
        auto h = [&](double y) { return f(Complex(c, sign * y)); };
        const double peak = std::max(0.0, sign * s.imag());
        const double split = peak + 4.0 * width;
        double e = 0.0, l = 0.0;
        if (peak > 0.0) {
            total += Kronrod::integrate(h, 0.0, peak, 15, tol.quadrature, &e, &l);
            err += e;
            l1 += l;
        }
        total += Kronrod::integrate(h, peak, split, 15, tol.quadrature, &e, &l);
        err += e;
        l1 += l;
        total += tail_rule.integrate(h, split, std::numeric_limits<double>::infinity(), tol.quadrature, &e, &l);
        err += e;
        l1 += l;
    }
    total /= 2.0 * std::numbers::pi;
    const double rel = l1 > 0.0 ? err / l1 : 0.0;
    if (!std::isfinite(total.real()) || !std::isfinite(total.imag()) || rel > 1e3 * tol.quadrature) {
        std::ostringstream msg;
        msg << "contour integral did not converge (relative error " << rel << ")";
        throw NumericalError(msg.str());
    }
    return {total, rel};
}

double contour_base(const TransformableInput& g) { return std::max(0.0, g.abscissa()); }

double contour_position(const OperatorSpec& spec, double base, Complex s) {
    if (!(s.real() - base > spec.margin)) {
        std::ostringstream msg;
        msg << "operator contour: Re s = " << s.real() << " is within the margin of the contour base " << base;
        throw DomainError(msg.str());
    }
    return base + spec.contour_fraction * (s.real() - base);
}

Estimate invert(const OperatorSpec& spec, const std::function<Complex(Complex)>& image, double base, double t,
                double& worst_quadrature) {
    const LaplaceFunction F{image, base, false};
    const auto r = laplace_inverse_checked(F, t, spec.tol);
    return {r.value, r.disagreement + worst_quadrature * std::abs(r.value)};
}

double interpolate(const SampledFunction& f, double t) {
    const auto& x = f.grid;
    detail::require(t >= x.front() && t <= x.back(), "operator: t outside the sampled grid");
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) return f.values.back();
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * f.values[j - 1] + w * f.values[j];
}

}  // namespace

Estimate eval_G(const OperatorSpec& spec, const TransformableInput& g, double t) {
    spec.validate();
    detail::require(spec.kind == OperatorSpec::Kind::G, "eval_G: spec is not a G operator");
    detail::require(t > 0.0 && std::isfinite(t), "eval_G: t must be > 0");
    if (g.is_sampled()) {
        auto out = apply_G(spec.beta, spec.gamma, g.samples());
        if (spec.outer_integral > 0.0) {
            if (!std::isfinite(out.values[0])) out.values[0] = 0.0;
            out = riemann_liouville_integral(out, spec.outer_integral);
        }
        return {interpolate(out, t), 0.0};
    }
    const double beta = spec.beta, gamma = spec.gamma;
    const double base = contour_base(g);
    const double prefactor = beta * std::tgamma(gamma + 1.0);
    double worst = 0.0;
    auto image = [&](Complex s) {
        const double c = contour_position(spec, base, s);
        const Complex sb = std::pow(s, beta);
        const auto inner = line_integral(
            [&](Complex z) { return g.image(z) * std::pow(sb - std::pow(z, beta), -gamma - 1.0); }, c, s, spec.tol);
        worst = std::max(worst, inner.relative_error);
        return prefactor * std::pow(s, beta - 1.0 - spec.outer_integral) * inner.value;
    };
    return invert(spec, image, base, t, worst);
}

Estimate eval_Lambda(const OperatorSpec& spec, const TransformableInput& g, double t) {
    spec.validate();
    detail::require(spec.kind == OperatorSpec::Kind::Lambda, "eval_Lambda: spec is not a Lambda operator");
    detail::require(t > 0.0 && std::isfinite(t), "eval_Lambda: t must be > 0");
    const double base = contour_base(g);
    const auto& model = *spec.model;
    const auto& sub = spec.sub;
    double worst = 0.0;
    auto image = [&](Complex s) {
        const double c = contour_position(spec, base, s);
        const Complex rs = sub.rho(s);
        const auto inner = line_integral(
            [&](Complex z) {
                const Complex w = rs - sub.rho(z);
                return variance_laplace(model, w, spec.tol).derivative * sub.m(z) * g.image(z);
            },
            c, s, spec.tol);
        worst = std::max(worst, inner.relative_error);
        return 0.5 * std::pow(s, -spec.outer_integral) * inner.value;
    };
    return invert(spec, image, base, t, worst);
}

SampledFunction apply_G(double beta, double gamma, const SampledFunction& g) {
    g.validate();
    detail::require(beta > 0.0 && beta <= 1.0, "apply_G: beta must be in (0,1]");
    detail::require(gamma > -1.0 && gamma < 1.0, "apply_G: gamma must be in (-1,1)");
    const auto& t = g.grid;
    const std::size_t n = t.size();
    if (gamma == 0.0) return g;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SampledFunction out{t, std::vector<double>(n)};
    if (beta == 1.0) {
        for (std::size_t i = 1; i < n; ++i) out.values[i] = std::pow(t[i], gamma) * g.values[i];
        out.values[0] = gamma > 0.0 ? 0.0 : (g.values[0] == 0.0 ? 0.0 : nan);
        return out;
    }
    // The constant part h0 = g(0) is mapped exactly (G[1] is known in closed
    // form); the remainder vanishes at t = 0, which keeps the fractional
    // rules accurate near the origin.
    const double h0 = g.values[0];
    SampledFunction f{std::vector<double>(n), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) f.grid[i] = std::pow(t[i], beta);
    for (std::size_t i = 1; i < n; ++i) f.values[i] = std::pow(f.grid[i], gamma) * (g.values[i] - h0);
    const double order = beta * gamma;
    const double c = std::tgamma(gamma + 1.0) * h0 / std::tgamma(1.0 + order);
    if (gamma > 0.0) {
        // EK = D_v^gamma[v^gamma h] (Caputo equals Riemann-Liouville as f(0) = 0).
        const auto ek = caputo_l1(f, gamma);
        out = riemann_liouville_integral(SampledFunction{t, ek.values}, order);
        for (std::size_t i = 1; i < n; ++i) out.values[i] += c * std::pow(t[i], order);
        out.values[0] = 0.0;
        return out;
    }
    // gamma < 0: EK = J_v^{-gamma}[v^gamma h], then the Riemann-Liouville
    // derivative of order -beta gamma.
    const auto jr = riemann_liouville_integral(f, -gamma);
    const auto d = caputo_l1(SampledFunction{t, jr.values}, -order);
    for (std::size_t i = 1; i < n; ++i) out.values[i] = d.values[i] + c * std::pow(t[i], order);
    out.values[0] = h0 == 0.0 ? d.values[0] : nan;
    return out;
}

ResidualField fbm_fpke_residual(double hurst, const SubordinatorSpec& spec, const GridDensity& density) {
    detail::require(hurst > 0.0 && hurst < 1.0, "fbm_fpke_residual: H must be in (0,1)");
    detail::require(spec.components().size() == 1 && spec.components()[0].weight == 1.0,
                    "fbm_fpke_residual: the subordinator must be a single stable component with weight 1");
    const double beta = spec.components()[0].beta;
    const double gamma = 2.0 * hurst - 1.0;
    const auto& x = density.x_grid;
    const auto& t = density.t_grid;
    const std::size_t nx = x.size(), nt = t.size();
    detail::require(density.values.size() == nx * nt, "fbm_fpke_residual: malformed density");
    detail::require(nt >= 3, "fbm_fpke_residual: need at least 3 time slices");
    const std::size_t band = std::max<std::size_t>(2, nx / 20);
    detail::require(nx >= 2 * band + 16, "fbm_fpke_residual: grid too coarse (fewer than 16 interior points)");
    const double h = x[1] - x[0];
    for (std::size_t k = 1; k < nx; ++k)
        detail::require(std::abs(x[k] - x[k - 1] - h) <= 1e-9 * h, "fbm_fpke_residual: x grid must be uniform");

    ResidualField out;
    out.t_grid.assign(t.begin() + 1, t.end());
    out.x_grid.assign(x.begin() + band, x.end() - band);
    const std::size_t m = out.x_grid.size();
    out.values.assign((nt - 1) * m, 0.0);

    const auto columns = static_cast<long long>(m);
#pragma omp parallel for schedule(dynamic, 8)
    for (long long c = 0; c < columns; ++c) {
        const std::size_t k = band + static_cast<std::size_t>(c);
        SampledFunction q{t, std::vector<double>(nt)}, lap{t, std::vector<double>(nt)};
        for (std::size_t i = 0; i < nt; ++i) {
            q.values[i] = density.at(i, k);
            lap.values[i] = (density.at(i, k + 1) - 2.0 * density.at(i, k) + density.at(i, k - 1)) / (h * h);
        }
        const auto dq = caputo_l1(q, beta);
        const auto gl = apply_G(beta, gamma, lap);
        for (std::size_t i = 1; i < nt; ++i)
            out.values[(i - 1) * m + static_cast<std::size_t>(c)] = dq.values[i] - hurst * gl.values[i];
    }
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        SliceResidual r{out.t_grid[i], 0.0, 0.0};
        double sum = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            const double v = out.values[i * m + c];
            sum += v * v * h;
            r.linf = std::max(r.linf, std::abs(v));
        }
        r.l2 = std::sqrt(sum);
        out.slices.push_back(r);
    }
    return out;
}

}  // namespace tcgp

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"

namespace tcgp {

namespace {

constexpr double pi = std::numbers::pi;

// (1 - e^{-z}) / z and (1 - e^{-z}(1+z)) / z^2, stable near z = 0.
void segment_kernels(Complex z, Complex& k0, Complex& k1) {
    if (std::abs(z) < 0.5) {
        Complex term0 = 1.0, term1 = 0.5, p = 1.0;
        k0 = 0.0;
        k1 = 0.0;
        double fact = 1.0;  // k!
        for (int k = 0; k < 25; ++k) {
            if (k > 0) {
                p *= -z;
                fact *= k;
            }
            term0 = p / (fact * (k + 1));
            term1 = p / (fact * (k + 2));
            k0 += term0;
            k1 += term1;
        }
        return;
    }
    const Complex e = std::exp(-z);
    k0 = (1.0 - e) / z;
    k1 = (1.0 - e * (1.0 + z)) / (z * z);
}

}  // namespace

ComplexEstimate laplace_forward(const SampledFunction& g, Complex s) {
    g.validate();
    detail::require(s.real() > 0.0, "laplace_forward: sampled data requires Re s > 0");
    Complex acc = 0.0;
    const auto& t = g.grid;
    const auto& y = g.values;
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double h = t[k] - t[k - 1];
        Complex k0, k1;
        segment_kernels(s * h, k0, k1);
        const Complex ea = std::exp(-s * t[k - 1]);
        acc += ea * h * (y[k - 1] * k0 + (y[k] - y[k - 1]) * k1);
    }
    acc += y.back() * std::exp(-s * t.back()) / s;
    return {acc, 0.0};
}

ComplexEstimate laplace_forward(const std::function<double(double)>& g, Complex s, double abscissa,
                                const Tolerances& tol) {
    const double sigma = s.real() - abscissa;
    if (!(sigma > 0.0)) {
        std::ostringstream msg;
        msg << "laplace_forward: Re s = " << s.real() << " not above abscissa " << abscissa;
        throw DomainError(msg.str());
    }
    const double omega = std::abs(s.imag());
    auto re_part = [&](double t) {
        if (t == 0.0) return 0.0;
        return g(t) * std::exp(-s.real() * t) * std::cos(omega * t);
    };
    auto im_part = [&](double t) {
        if (t == 0.0) return 0.0;
        return -g(t) * std::exp(-s.real() * t) * std::sin(omega * t);
    };
    const double sign = s.imag() < 0.0 ? -1.0 : 1.0;

    if (omega <= sigma) {
        boost::math::quadrature::exp_sinh<double> integrator;
        double err_re = 0.0, err_im = 0.0, l1 = 0.0;
        const double re = integrator.integrate(re_part, tol.quadrature, &err_re, &l1);
        const double im = omega == 0.0 ? 0.0 : integrator.integrate(im_part, tol.quadrature, &err_im, &l1);
        const double err = std::hypot(err_re * std::abs(re), err_im * std::abs(im));
        if (!std::isfinite(re) || !std::isfinite(im))
            throw NumericalError("laplace_forward: quadrature produced a non-finite value");
        return {Complex(re, sign * im), err};
    }

    // Oscillatory case: half-period panels, the first handled by tanh-sinh
    // to tolerate integrable endpoint singularities at t = 0.
    const double panel = pi / omega;
    boost::math::quadrature::tanh_sinh<double> ts;
    double err_re = 0.0, err_im = 0.0;
    double re = ts.integrate(re_part, 0.0, panel, tol.quadrature, &err_re);
    double im = ts.integrate(im_part, 0.0, panel, tol.quadrature, &err_im);
    double err = err_re * std::abs(re) + err_im * std::abs(im);
    int quiet = 0;
    const int max_panels = 200000;
    for (int k = 1; k < max_panels; ++k) {
        const double a = k * panel, b = a + panel;
        double e1 = 0.0, e2 = 0.0;
        const double dr = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            re_part, a, b, 8, tol.quadrature, &e1);
        const double di = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            im_part, a, b, 8, tol.quadrature, &e2);
        re += dr;
        im += di;
        err += e1 + e2;
        const double scale = std::max(std::hypot(re, im), 1e-300);
        if (std::hypot(dr, di) < 1e-3 * tol.quadrature * scale && sigma * b > 30.0) {
            if (++quiet >= 4) {
                if (!std::isfinite(re) || !std::isfinite(im))
                    throw NumericalError("laplace_forward: quadrature produced a non-finite value");
                return {Complex(re, sign * im), err};
            }
        } else {
            quiet = 0;
        }
    }
    throw NumericalError("laplace_forward: oscillatory quadrature did not converge");
}

double invert_talbot(const LaplaceFunction& F, double t, int nodes) {
    detail::require(t > 0.0, "laplace inversion requires t > 0");
    detail::require(nodes >= 4, "talbot: too few nodes");
    const double shift = std::max(F.abscissa, 0.0);
    const int M = nodes;
    const double r = 2.0 * M / (5.0 * t);
    double acc = 0.5 * std::exp(r * t) * F.image(Complex(r + shift, 0.0)).real();
    for (int k = 1; k < M; ++k) {
        const double theta = k * pi / M;
        const double cot = 1.0 / std::tan(theta);
        const Complex sk(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        acc += (std::exp(t * sk) * F.image(sk + shift) * Complex(1.0, sigma)).real();
    }
    return std::exp(shift * t) * r / M * acc;
}

double invert_de_hoog(const LaplaceFunction& F, double t, int degree, double tolerance) {
    detail::require(t > 0.0, "laplace inversion requires t > 0");
    detail::require(degree >= 2, "de Hoog: degree too small");
    const int M = degree;
    const int np = 2 * M + 1;
    const double shift = std::max(F.abscissa, 0.0);
    const double T = 2.0 * t;
    const double gamma = shift - std::log(tolerance) / (2.0 * T);

    std::vector<Complex> fp(np);
    for (int k = 0; k < np; ++k) fp[k] = F.image(Complex(gamma, pi * k / T));

    // Quotient-difference table for the continued-fraction coefficients.
    std::vector<std::vector<Complex>> e(np, std::vector<Complex>(M + 1));
    std::vector<std::vector<Complex>> q(2 * M, std::vector<Complex>(M));
    q[0][0] = fp[1] / (fp[0] / 2.0);
    for (int i = 1; i < 2 * M; ++i) q[i][0] = fp[i + 1] / fp[i];
    for (int r = 1; r <= M; ++r) {
        const int mr = 2 * (M - r) + 1;
        for (int i = 0; i < mr; ++i) e[i][r] = q[i + 1][r - 1] - q[i][r - 1] + e[i + 1][r - 1];
        if (r != M) {
            const int mq = 2 * (M - r - 1) + 3;
            for (int i = 0; i < mq; ++i) q[i][r] = q[i + 1][r - 1] * e[i + 1][r] / e[i][r];
        }
    }
    std::vector<Complex> d(np);
    d[0] = fp[0] / 2.0;
    for (int r = 1; r <= M; ++r) {
        d[2 * r - 1] = -q[0][r - 1];
        d[2 * r] = -e[0][r];
    }

    std::vector<Complex> A(np + 1), B(np + 1, Complex(1.0, 0.0));
    A[0] = 0.0;
    A[1] = d[0];
    const Complex z = std::exp(Complex(0.0, pi * t / T));
    for (int i = 1; i < 2 * M; ++i) {
        A[i + 1] = A[i] + d[i] * A[i - 1] * z;
        B[i + 1] = B[i] + d[i] * B[i - 1] * z;
    }
    const Complex brem = (1.0 + (d[2 * M - 1] - d[2 * M]) * z) / 2.0;
    const Complex rem = brem * (std::sqrt(1.0 + d[2 * M] * z / (brem * brem)) - 1.0);
    A[np] = A[2 * M] + rem * A[2 * M - 1];
    B[np] = B[2 * M] + rem * B[2 * M - 1];
    return std::exp(gamma * t) / T * (A[np] / B[np]).real();
}

double invert_cohen(const LaplaceFunction& F, double t, int terms, double digits) {
    detail::require(t > 0.0, "laplace inversion requires t > 0");
    detail::require(terms >= 2, "cohen: too few terms");
    const double shift = std::max(F.abscissa, 0.0);
    const int n = terms;
    // Abscissa in units of 1/t, independent of the time scale.
    const double alpha = 2.0 / 3.0 * (digits * std::log(10.0) + std::log(2.0));
    std::vector<double> a(n + 1);
    for (int k = 0; k <= n; ++k)
        a[k] = F.image(Complex(alpha / (2.0 * t) + shift, pi * k / t)).real();

    // Cohen-Rodriguez Villegas-Zagier acceleration of the alternating tail.
    double dd = std::pow(3.0 + std::sqrt(8.0), n);
    dd = (dd + 1.0 / dd) / 2.0;
    double b = -1.0, c = -dd, s = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a[k + 1];
        b = 2.0 * (k + n) * (k - n) * b / ((2.0 * k + 1.0) * (k + 1.0));
    }
    return std::exp(shift * t) * std::exp(alpha / 2.0) / t * (a[0] / 2.0 - s / dd);
}

InversionResult laplace_inverse_checked(const LaplaceFunction& F, double t, const Tolerances& tol,
                                        double scale) {
    if (!(t > 0.0)) throw DomainError("laplace_inverse requires t > 0");
    detail::require(scale > 0.0, "laplace_inverse: scale must be positive");
    auto agree = [&](double a, double b) {
        return std::isfinite(a) && std::isfinite(b) &&
               std::abs(a - b) <= tol.inversion_agreement * std::max(scale, std::abs(a));
    };
    const double hoog = invert_de_hoog(F, t, tol.de_hoog_degree, tol.de_hoog_tolerance);
    double talbot = std::numeric_limits<double>::quiet_NaN();
    if (F.cut_plane_analytic) {
        talbot = invert_talbot(F, t, tol.talbot_nodes);
        if (agree(hoog, talbot)) return {hoog, std::abs(talbot - hoog)};
    }
    // Talbot is unusable (no continuation) or wrong for this image, which
    // happens when F grows along the left part of its contour: ask Cohen.
    const double cohen = invert_cohen(F, t, tol.cohen_terms, tol.cohen_digits);
    if (agree(hoog, cohen)) return {hoog, std::abs(hoog - cohen)};
    std::ostringstream msg;
    msg << "laplace_inverse: methods disagree at t=" << t << " (de Hoog " << hoog << ", Cohen " << cohen;
    if (F.cut_plane_analytic) msg << ", Talbot " << talbot;
    msg << ")";
    throw NumericalError(msg.str());
}

double laplace_inverse(const LaplaceFunction& F, double t, const Tolerances& tol, double scale) {
    return laplace_inverse_checked(F, t, tol, scale).value;
}

}  // namespace tcgp

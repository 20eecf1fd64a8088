#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "tcgp/errors.hpp"
#include "tcgp/gaussian.hpp"
#include "volterra.hpp"

namespace tcgp {

namespace {

// K_H(t,r) / c_H. With a = H - 1/2 and v = (u - r)^a the defining integral
// int_r^t (u-r)^{H-3/2} u^{H-1/2} du becomes (1/a) int_0^{(t-r)^a} (r + v^{1/a})^a dv,
// whose integrand is smooth.
double unit_kernel(double hurst, double t, double r, double tol) {
    if (!(r > 0.0) || !(r < t)) return 0.0;
    const double a = hurst - 0.5;
    const double upper = std::pow(t - r, a);
    auto f = [&](double v) { return std::pow(r + std::pow(v, 1.0 / a), a); };
    double err = 0.0;
    const double inner =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 15, tol, &err);
    return std::pow(r, -a) * inner / a;
}

// int_0^{min(s,t)} k_{hs}(s,r) k_{ht}(t,r) dr with unit constants.
double unit_kernel_product(double hs, double s, double ht, double t, double tol) {
    const double m = std::min(s, t);
    if (m <= 0.0) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double r) { return unit_kernel(hs, s, r, 0.1 * tol) * unit_kernel(ht, t, r, 0.1 * tol); };
    double err = 0.0, l1 = 0.0;
    const double value = ts.integrate(f, 0.0, m, tol, &err, &l1);
    if (!std::isfinite(value) || err > 100.0 * tol * std::max(l1, 1e-300)) {
        std::ostringstream msg;
        msg << "volterra covariance quadrature failed at (s,t)=(" << s << "," << t << ")";
        throw NumericalError(msg.str());
    }
    return value;
}

double fbm_covariance(double h, double s, double t) {
    return 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(s - t), 2 * h));
}

}  // namespace

double calibrate_volterra_constant(double hurst, const Tolerances& tol) {
    detail::require(hurst > 0.5 && hurst < 1.0, "calibrate_volterra_constant: H must lie in (1/2,1)");
    static std::mutex mutex;
    static std::map<std::pair<double, double>, double> cache;
    const auto key = std::make_pair(hurst, tol.quadrature);
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const double q = std::min(tol.quadrature, 1e-9);
    const double c = 1.0 / std::sqrt(unit_kernel_product(hurst, 1.0, hurst, 1.0, q));
    const double check = c * c * unit_kernel_product(hurst, 1.0, hurst, 2.0, q);
    const double target = fbm_covariance(hurst, 1.0, 2.0);
    if (std::abs(check - target) > 1e3 * q * target) {
        std::ostringstream msg;
        msg << "calibrate_volterra_constant: verification at (1,2) gave " << check << " instead of "
            << target << " for H=" << hurst;
        throw NumericalError(msg.str());
    }
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, c);
    return c;
}

double volterra_kernel(double hurst, double t, double r, const Tolerances& tol) {
    detail::require(hurst > 0.5 && hurst < 1.0, "volterra_kernel: H must lie in (1/2,1)");
    return calibrate_volterra_constant(hurst, tol) * unit_kernel(hurst, t, r, tol.quadrature);
}

namespace detail {

double variable_hurst_covariance(const HurstFunction& h, double s, double t, const Tolerances& tol) {
    if (s <= 0.0 || t <= 0.0) return 0.0;
    const double hs = h.value(s), ht = h.value(t);
    const double q = std::min(tol.quadrature, 1e-9);
    return calibrate_volterra_constant(hs, tol) * calibrate_volterra_constant(ht, tol) *
           unit_kernel_product(hs, s, ht, t, q);
}

}  // namespace detail

}  // namespace tcgp

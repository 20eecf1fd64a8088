#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"

namespace tcgp {

namespace {

struct SeriesResult {
    double value;
    bool trusted;
};

// Power series in extended precision. `trusted` is false when the largest
// term is so big that cancellation has eaten the target accuracy.
SeriesResult ml_series(double alpha, double z) {
    using ld = long double;
    const ld lz = z;
    const ld log_abs = z == 0.0 ? 0.0L : std::log(std::fabs(lz));
    ld sum = 1.0L, max_term = 1.0L;
    for (int k = 1; k < 20000; ++k) {
        const ld mag = std::exp(k * log_abs - std::lgamma(static_cast<ld>(alpha) * k + 1.0L));
        if (!std::isfinite(static_cast<double>(mag)))
            throw NumericalError("mittag_leffler: series overflow");
        const ld term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
        sum += term;
        max_term = std::max(max_term, mag);
        // Terms decay monotonically once alpha*k exceeds |z|^(1/alpha).
        if (mag < std::numeric_limits<ld>::epsilon() * std::fabs(sum) &&
            alpha * k > std::pow(std::fabs(static_cast<double>(z)), 1.0 / alpha) + 1.0)
            break;
    }
    const bool trusted =
        max_term * std::numeric_limits<ld>::epsilon() <= 1e-11L * std::fabs(sum);
    return {static_cast<double>(sum), trusted};
}

// E_alpha(-x) for x > 0 and alpha in (0,1), from the spectral representation
//   sin(a pi)/(a pi) * int_0^inf exp(-(u x)^(1/a)) / (u^2 + 2u cos(a pi) + 1) du,
// integrated in v = u x with a split at v = x where the denominator peaks.
double ml_negative_integral(double alpha, double x) {
    const double pi = std::numbers::pi;
    const double c = std::cos(alpha * pi);
    const double inv_a = 1.0 / alpha;
    auto f = [&](double v) {
        const double u = v / x;
        return std::exp(-std::pow(v, inv_a)) / (u * u + 2.0 * u * c + 1.0);
    };
    double err0 = 0.0, err1 = 0.0;
    boost::math::quadrature::tanh_sinh<double> head_rule;
    const double head = head_rule.integrate(f, 0.0, x, 1e-14, &err0);
    boost::math::quadrature::exp_sinh<double> tail_rule;
    auto shifted = [&](double w) { return f(x + w); };
    double l1 = 0.0;
    const double tail = tail_rule.integrate(shifted, 1e-14, &err1, &l1);
    const double total = (head + tail) / x;
    const double err = (err0 + err1) / x;
    if (!std::isfinite(total) || err > 1e-11 * std::fabs(total))
        throw NumericalError("mittag_leffler: integral representation did not converge");
    return std::sin(alpha * pi) / (alpha * pi) * total;
}

}  // namespace

double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("mittag_leffler: alpha must lie in (0,1]");
    if (!std::isfinite(z)) throw DomainError("mittag_leffler: z must be finite");
    if (alpha == 1.0) {
        const double v = std::exp(z);
        if (!std::isfinite(v)) throw NumericalError("mittag_leffler: overflow");
        return v;
    }
    if (z == 0.0) return 1.0;
    if (z > 0.0) {
        // All terms positive: no cancellation, only overflow can go wrong.
        const auto r = ml_series(alpha, z);
        if (!std::isfinite(r.value)) throw NumericalError("mittag_leffler: overflow");
        return r.value;
    }
    if (z >= -5.0) {
        const auto r = ml_series(alpha, z);
        if (r.trusted) return r.value;
    }
    return ml_negative_integral(alpha, -z);
}

}  // namespace tcgp

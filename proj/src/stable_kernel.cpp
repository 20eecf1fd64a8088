#include "stable_kernel.hpp"

#include <cmath>
#include <numbers>

namespace tcgp::detail {

void kanter_transform(std::size_t n, double beta, const double* u, const double* v, double* out) {
    const double inv_beta = 1.0 / beta;
    const double tail = (1.0 - beta) * inv_beta;
#pragma omp simd
    for (std::size_t i = 0; i < n; ++i) {
        const double angle = std::numbers::pi * u[i];
        const double a = beta * angle;
        const double sa = std::sin(a), sb = std::sin(angle - a), su = std::sin(angle);
        const double e = -std::log(v[i]);
        out[i] = std::exp(std::log(sa) - inv_beta * std::log(su) + tail * (std::log(sb) - std::log(e)));
    }
}

}  // namespace tcgp::detail

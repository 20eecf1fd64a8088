#pragma once

#include <cstddef>

namespace tcgp::detail {

/// Kanter transform of n pairs of uniforms on (0,1) into unit positive
/// stable draws (Laplace transform exp(-s^beta)). Compiled with vector math.
void kanter_transform(std::size_t n, double beta, const double* u, const double* v, double* out);

}  // namespace tcgp::detail

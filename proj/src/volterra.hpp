#pragma once

#include "tcgp/gaussian.hpp"

namespace tcgp::detail {

/// int_0^{min(s,t)} K_{H(s)}(s,r) K_{H(t)}(t,r) dr with calibrated constants.
double variable_hurst_covariance(const HurstFunction& h, double s, double t, const Tolerances& tol);

}  // namespace tcgp::detail

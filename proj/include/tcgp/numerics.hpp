#pragma once

#include <complex>

namespace tcgp {

using Complex = std::complex<double>;

/// A value with an absolute error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct ComplexEstimate {
    Complex value{};
    double error = 0.0;
};

/// Every tolerance and method-size knob in one place.
struct Tolerances {
    double quadrature = 1e-8;            // relative target for adaptive quadrature
    double inversion_agreement = 1e-6;   // max |a-b| / max(1,|a|) between inversion methods
    double density_floor = 1e-8;         // negatives above -floor are clamped to zero
    int talbot_nodes = 24;
    int de_hoog_degree = 20;
    double de_hoog_tolerance = 1e-12;
    int cohen_terms = 30;
    double cohen_digits = 16.0;
};

}  // namespace tcgp

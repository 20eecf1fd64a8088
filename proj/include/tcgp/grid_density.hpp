#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tcgp {

/// Density values on a time x space grid (one spatial dimension).
struct GridDensity {
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::vector<double> values;      // row-major, t_grid.size() x x_grid.size()
    std::vector<double> mass_error;  // |1 - int q dx| per time slice
    std::size_t clamped = 0;         // small negative values set to zero

    double at(std::size_t i, std::size_t k) const { return values[i * x_grid.size() + k]; }
    double& at(std::size_t i, std::size_t k) { return values[i * x_grid.size() + k]; }
    std::span<const double> slice(std::size_t i) const {
        return {values.data() + i * x_grid.size(), x_grid.size()};
    }
};

/// Trapezoid integral of samples on a (possibly nonuniform) grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Fills mass_error from trapezoid integrals of every slice. Slices at
/// t = 0 (a point mass) are measured the same way.
void update_mass_error(GridDensity& density);

}  // namespace tcgp

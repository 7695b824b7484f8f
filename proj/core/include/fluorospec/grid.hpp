#pragma once

#include <cstddef>
#include <vector>

#include "fluorospec/drive_params.hpp"

namespace fluorospec {

/// Uniform frequency grid [omega_min, omega_max] with `points` samples.
struct FrequencyGrid {
    double omega_min = -1.0;
    double omega_max = 1.0;
    std::size_t points = 2001;

    double step() const noexcept {
        return (omega_max - omega_min) / static_cast<double>(points - 1);
    }

    /// Sample values. A grid symmetric about zero is generated exactly
    /// antisymmetric, and an odd point count puts an exact 0 at the centre.
    std::vector<double> values() const;
};

inline constexpr std::size_t kDefaultGridPoints = 2001;

/// 2001 points over +-4 max(Gamma, sqrt(Omega^2 + Delta^2)).
FrequencyGrid default_grid(const DriveParams& params, std::size_t points = kDefaultGridPoints);

/// Half-width of the default grid.
double default_grid_halfwidth(const DriveParams& params);

}  // namespace fluorospec

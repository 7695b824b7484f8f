#include "fluorospec/grid.hpp"

#include <cmath>

#include "fluorospec/error.hpp"

namespace fluorospec {

std::vector<double> FrequencyGrid::values() const {
    if (points < 2 || !(omega_min < omega_max))
        throw Error(ErrorCode::grid_too_small, "grid needs at least two points and omega_min < omega_max");
    const double centre = 0.5 * (omega_min + omega_max);
    const double half = 0.5 * (omega_max - omega_min);
    const double denom = static_cast<double>(points - 1);
    std::vector<double> out(points);
    for (std::size_t k = 0; k < points; ++k) {
        const double offset = static_cast<double>(2 * static_cast<long long>(k) -
                                                  static_cast<long long>(points - 1));
        out[k] = centre + half * (offset / denom);
    }
    return out;
}

double default_grid_halfwidth(const DriveParams& p) {
    return 4.0 * std::max(p.big_gamma(), std::hypot(p.rabi, p.detuning));
}

FrequencyGrid default_grid(const DriveParams& p, std::size_t points) {
    validate(p);
    const double w = default_grid_halfwidth(p);
    return {-w, w, points};
}

}  // namespace fluorospec

#pragma once

#include <algorithm>
#include <cmath>

namespace fluorospec {

/// Physical rates of a two-level atom driven by a phase-diffusing laser.
///
/// All four inputs share one (arbitrary) frequency unit; every formula in
/// the library is homogeneous in that unit. Frequencies are offsets from the
/// laser frequency, so the atomic and laser frequencies only enter through
/// the detuning.
struct DriveParams {
    double gamma = 1.0;      ///< spontaneous decay rate
    double rabi = 0.0;       ///< Rabi frequency
    double detuning = 0.0;   ///< atomic minus laser frequency
    double linewidth = 0.0;  ///< laser bandwidth from phase diffusion

    /// Transverse (coherence) relaxation rate.
    double big_gamma() const noexcept { return gamma + linewidth; }
    /// Longitudinal (population) relaxation rate.
    double gamma_z() const noexcept { return 2.0 * gamma; }
    double gamma_plus() const noexcept { return 0.5 * (big_gamma() + gamma_z()); }
    double gamma_minus() const noexcept { return 0.5 * (big_gamma() - gamma_z()); }

    /// Largest rate in the Bloch generator; the fixed-step guard is dt * max_rate() <= 0.1.
    double max_rate() const noexcept {
        return std::max({big_gamma(), gamma_z(), rabi, std::abs(detuning)});
    }

    /// Same physics expressed in units of gamma (gamma == 1).
    DriveParams reduced() const noexcept {
        return {1.0, rabi / gamma, detuning / gamma, linewidth / gamma};
    }

    bool operator==(const DriveParams&) const = default;
};

/// Throws Error(invalid_params) unless gamma > 0, rabi >= 0, linewidth >= 0
/// and every field is finite.
void validate(const DriveParams& params);

/// Throws Error(step_too_coarse) if dt * params.max_rate() > 0.1 or dt <= 0.
void check_step(const DriveParams& params, double dt);

inline constexpr double kStepGuard = 0.1;

/// Default integrator steps run at this fraction of the stability guard.
inline constexpr double kDefaultStepFraction = 0.25;

}  // namespace fluorospec

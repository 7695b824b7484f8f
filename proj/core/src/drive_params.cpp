#include "fluorospec/drive_params.hpp"

#include <string>

#include "fluorospec/error.hpp"

namespace fluorospec {

void validate(const DriveParams& p) {
    const bool finite = std::isfinite(p.gamma) && std::isfinite(p.rabi) &&
                        std::isfinite(p.detuning) && std::isfinite(p.linewidth);
    if (!finite) throw Error(ErrorCode::invalid_params, "drive parameters must be finite");
    if (!(p.gamma > 0.0)) throw Error(ErrorCode::invalid_params, "gamma must be positive");
    if (p.rabi < 0.0) throw Error(ErrorCode::invalid_params, "rabi must be non-negative");
    if (p.linewidth < 0.0) throw Error(ErrorCode::invalid_params, "linewidth must be non-negative");
}

void check_step(const DriveParams& p, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorCode::step_too_coarse, "step size must be positive");
    if (dt * p.max_rate() > kStepGuard * (1.0 + 1e-12)) {
        throw Error(ErrorCode::step_too_coarse,
                    "step size too coarse: dt * max_rate = " + std::to_string(dt * p.max_rate()) +
                        " exceeds " + std::to_string(kStepGuard));
    }
}

}  // namespace fluorospec

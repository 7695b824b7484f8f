#include "fluorospec/error.hpp"

namespace fluorospec {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_params: return "invalid_params";
        case ErrorCode::step_too_coarse: return "step_too_coarse";
        case ErrorCode::pole_at_origin: return "pole_at_origin";
        case ErrorCode::singular_denominator: return "singular_denominator";
        case ErrorCode::singular_resolvent: return "singular_resolvent";
        case ErrorCode::undecayed_trace: return "undecayed_trace";
        case ErrorCode::nonzero_detuning: return "nonzero_detuning";
        case ErrorCode::grid_too_small: return "grid_too_small";
        case ErrorCode::asymmetric_grid: return "asymmetric_grid";
        case ErrorCode::too_few_realizations: return "too_few_realizations";
        case ErrorCode::insufficient_relaxation: return "insufficient_relaxation";
        case ErrorCode::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

}  // namespace fluorospec

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fluorospec {

enum class ErrorCode {
    invalid_params,
    step_too_coarse,
    pole_at_origin,
    singular_denominator,
    singular_resolvent,
    undecayed_trace,
    nonzero_detuning,
    grid_too_small,
    asymmetric_grid,
    too_few_realizations,
    insufficient_relaxation,
    invalid_argument,
};

/// Stable snake_case identifier, used in machine-readable CLI errors.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fluorospec

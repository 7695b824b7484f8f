#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fluorospec::cli {

struct Check {
    std::string suite;
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string note;
};

struct VerifyOptions {
    std::uint64_t param_seed = 2024;  ///< random parameter draws
    std::uint64_t seed = 1;           ///< Monte Carlo noise
    std::size_t oracle_draws = 100;
    std::size_t sumrule_draws = 20;
    std::size_t realizations = 2000;
    double mc_dt = 1e-4;
    double resolvent_tol = 1e-10;
    double fourier_tol = 1e-4;
    double sumrule_tol = 1e-3;
    double mc_sigmas = 3.0;
    double dressed_tol = 0.05;
    double approx_tol = 0.02;
};

/// Individual suites, in the order `all` runs them.
const std::vector<std::string>& suite_names();

/// Throws fluorospec::Error(invalid_argument) for an unknown suite name.
std::vector<Check> run_suite(std::string_view suite, const VerifyOptions& options);

/// One line per check: `PASS suite/name measured=... threshold=...`.
void print_report(std::ostream& os, const std::vector<Check>& checks);

}  // namespace fluorospec::cli

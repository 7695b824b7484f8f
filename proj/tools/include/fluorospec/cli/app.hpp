#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fluorospec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name). Data and
/// summaries go to `out`; errors go to `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fluorospec::cli

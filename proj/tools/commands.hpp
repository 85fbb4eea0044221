#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace entroprune::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitItemFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `entroprune` tool. `args` excludes the program name.
///
/// Subcommands: classify, entropy-map, sweep, flops, bench, analyze, make-toy.
/// Exit codes: 0 success, 1 at least one input failed, 2 configuration or usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entroprune::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sidebandit::cli {

// Exit codes: 0 success, 1 runtime failure (assertion, failed verification),
// 2 invalid input (bad flags, config, instance or parameters).
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;

/// Entry point for `bandit_sim <run|lp|verify|gen> [flags]`. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sidebandit::cli

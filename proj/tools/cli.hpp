#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perpetual::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (simulate, analyze, replay, explore). `args` excludes
/// the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perpetual::cli

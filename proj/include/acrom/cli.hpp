#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acrom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `acrom` tool. Subcommands: mesh, offline, pod, rom,
/// angles, convergence, report. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace acrom::cli

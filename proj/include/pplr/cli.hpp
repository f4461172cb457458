#pragma once

#include <string>
#include <vector>

namespace pplr {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;         // bad flags, contract violations, unreadable input
inline constexpr int kExitNotConverged = 3;  // outputs written but some fit did not converge

// Entry point shared by the `pplr` binary and the tests. Subcommands: fit,
// test, path, simulate, prostate.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

} // namespace pplr

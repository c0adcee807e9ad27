#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace easirp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Runs one command. `args` excludes the program name. Returns kExitOk,
// kExitUsage (bad flags, inconsistent dimensions) or kExitRuntime (data,
// model or numerical failures).
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace easirp

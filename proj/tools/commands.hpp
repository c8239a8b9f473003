#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace heatflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Output and error text
/// go to the given streams; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heatflow::cli

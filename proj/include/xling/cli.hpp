#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xling::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Runs one `xling` command. Errors are reported as a JSON object on `err`;
// the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xling::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leocap {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int numerical = 3;
} // namespace exit_code

/// Runs the command line (without the program name) and returns the exit code.
/// Results go to `--out` when given and to `out` otherwise.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace leocap

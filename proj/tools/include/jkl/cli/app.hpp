#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jkl/network.hpp"

namespace jkl::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kRejected = 3, kNumerical = 4 };

/// Entry point of the `jkl` tool; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "N" gives N + 1 evenly spaced times on [0, t_end]; "a,b,c" is taken literally.
std::vector<double> parse_grid(const std::string& spec, double t_end);
std::vector<double> parse_list(const std::string& text);
State parse_state(const std::string& text);
std::pair<std::string, double> parse_assignment(const std::string& text);

}  // namespace jkl::cli

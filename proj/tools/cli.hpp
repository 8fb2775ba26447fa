#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace comodep::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kParseError = 2;
inline constexpr int kDegenerate = 3;
inline constexpr int kInvalidModel = 4;

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Formats with 12 significant digits.
std::string format_value(double x);

}  // namespace comodep::cli

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCap = 3;
inline constexpr int kExitSolver = 4;

// Entry point of the command-line tool; args[0] is the program name.
// Returns the process exit code and never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view data);
// 12 significant digits, the precision of every number the tool prints.
std::string format_number(double x);

}  // namespace mg

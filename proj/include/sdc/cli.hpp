#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdc {

// Exit codes of run_command beyond CLI11's own usage codes.
inline constexpr int kExitConfigError = 3;
inline constexpr int kExitRunError = 4;

/// Entry point of the bench tool. `args` includes the program name. Documents
/// go to `out` (or the --out file); usage text and structured error JSON go to
/// `err`.
int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// "a:b:n" with optional pi suffixes on a and b, e.g. "0:2pi:17".
std::vector<double> parse_grid(const std::string &spec);

} // namespace sdc

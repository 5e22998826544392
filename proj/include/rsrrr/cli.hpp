#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsrrr::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsageError = 2 };

//! Runs the command line `args` (without the program name). Messages go to
//! `out` and `err`; the return value is the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

//! Parses "a,b,c" into numbers; "inf" is accepted when `allow_inf`.
std::vector<double> parse_grid(const std::string& text, bool allow_inf);

}  // namespace rsrrr::cli

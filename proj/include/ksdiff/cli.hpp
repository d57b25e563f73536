#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ksdiff::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumeric = 3, kVerification = 4 };

/// Runs the command line `args` (args[0] is the program name).  Results go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// key=value lines; '#' starts a comment; blank lines are ignored.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace ksdiff::cli

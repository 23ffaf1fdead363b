#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prony::cli {

enum ExitCode : int { Clean = 0, Warnings = 1, InputFailure = 2, IoFailure = 3 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless an output path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prony::cli

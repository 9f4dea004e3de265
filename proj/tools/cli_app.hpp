#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace f3bp::cli {

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kUsageError = 2 };

/// Runs the command line with `args` (excluding the program name). Primary
/// output goes to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a", "a/b" (fractions) into a double; throws f3bp::InvalidInput.
double parse_number(const std::string& s);

}  // namespace f3bp::cli

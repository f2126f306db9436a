#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geopmp::cli {

/// Exit codes of every command.
enum ExitCode : int { kSuccess = 0, kInputError = 1, kNumericalError = 2 };

/**
 * Runs one command line (args excludes the program name). Diagnostics go to
 * `err`; the last line written to `out` is always "RESULT " followed by a
 * one-line JSON summary.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a,b,c" into numbers; throws ArgumentError on malformed input.
std::vector<double> parse_number_list(const std::string& text, const std::string& what);

}  // namespace geopmp::cli

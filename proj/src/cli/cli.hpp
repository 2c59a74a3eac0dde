#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tunneltime::cli {

enum ExitCode : int { ok = 0, config_error = 2, domain_error = 3, verification_failure = 4 };

/// Runs one command line (args excludes the program name). Data goes to --out or
/// to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.17g"
std::string format_number(double x);

}  // namespace tunneltime::cli

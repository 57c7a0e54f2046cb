#pragma once

#include <iosfwd>

namespace dirac::cli {

/// Exit codes of dirac-compose.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,      ///< bad flags, unreadable or unwritable files
    exit_parse = 2,      ///< malformed document or invalid parameters
    exit_dimension = 3,
    exit_dirac = 4,      ///< a relation or kernel failed its Dirac check
    exit_solver = 5,
};

/// Entry point of dirac-compose; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace dirac::cli

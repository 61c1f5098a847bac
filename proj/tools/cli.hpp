#pragma once

#include <iosfwd>

namespace faan::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    infeasible = 2,
    not_converged = 3,
    usage = 64,
};

/// Runs one command line; all output goes to `out` / `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace faan::cli

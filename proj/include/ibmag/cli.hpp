#pragma once

#include <iosfwd>

namespace ibmag {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2 };

/// Runs `ibmag <command> ...`. Human-readable output goes to `out`,
/// diagnostics to `err`; files are written below `--out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ibmag

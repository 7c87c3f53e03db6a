#pragma once

#include <iosfwd>

namespace deepesn {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

/// Entry point of the `deepesn` command-line tool. Human-readable progress
/// goes to `out`; failures are reported on `err` as a one-line JSON record
/// {"error": {"kind": ..., "message": ...}}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace deepesn

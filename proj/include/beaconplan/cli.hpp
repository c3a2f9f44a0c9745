#pragma once

#include <iosfwd>

namespace beaconplan
{

// Process exit codes.
enum ExitCode : int
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitRuntime = 3,
};

// Entry point of the `beaconplan` tool; diagnostics go to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace beaconplan

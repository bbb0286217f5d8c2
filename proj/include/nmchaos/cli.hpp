#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace nmchaos {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
  kExitUsage = 64,
  kExitInterrupted = 130,
};

/// Set from a signal handler to stop a running sweep after the cells in flight.
std::atomic<bool>& cli_cancel_flag();

/// Entry point behind the nmchaos executable. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nmchaos

#pragma once

#include <atomic>
#include <ostream>
#include <string>
#include <vector>

namespace amspec::cli {

enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitUsage = 2 };

/// Set from a SIGINT handler; sweeps stop claiming new energies once it is true.
std::atomic<bool>& interrupt_flag();

/// Entry point shared by the binary and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amspec::cli

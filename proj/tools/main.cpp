#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "amspec_cli/cli.hpp"

namespace {

extern "C" void on_interrupt(int) { amspec::cli::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  const std::vector<std::string> args(argv + 1, argv + argc);
  return amspec::cli::run_cli(args, std::cout, std::cerr);
}

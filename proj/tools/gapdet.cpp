// SPDX-License-Identifier: MIT
#include <iostream>
#include <string>
#include <vector>

#include "gapdet/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return gapdet::cli::main_entry(args, std::cout, std::cerr);
}

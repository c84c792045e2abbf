// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "entropik/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return entropik::run_cli(args, std::cout, std::cerr);
}

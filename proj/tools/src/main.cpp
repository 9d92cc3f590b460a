#include <iostream>

#include "gridshield/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gridshield::cli::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "pipefair/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pipefair::run_cli(args, std::cout, std::cerr);
}

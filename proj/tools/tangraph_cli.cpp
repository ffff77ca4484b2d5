#include <iostream>
#include <string>
#include <vector>

#include "tangraph/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tangraph::run_cli(args, std::cout, std::cerr);
}

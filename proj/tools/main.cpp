#include <iostream>

#include "supplygraph/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return supplygraph::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "mhsbm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mhsbm::run_cli(args, std::cout, std::cerr);
}

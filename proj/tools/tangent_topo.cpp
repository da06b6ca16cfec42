#include <iostream>
#include <string>
#include <vector>

#include "tangent_topo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ttopo::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "plab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return plab::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "hakernel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return hakernel::cli::run(args, std::cout, std::cerr);
}

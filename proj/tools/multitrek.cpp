#include <iostream>
#include <string>
#include <vector>

#include "multitrek/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return multitrek::cli::run(args, std::cout, std::cerr);
}

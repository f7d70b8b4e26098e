#include <iostream>
#include <string>
#include <vector>

#include "losg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return losg::run_cli(args, std::cout, std::cerr);
}

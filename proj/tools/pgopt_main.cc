#include <iostream>
#include <string>
#include <vector>

#include "pgopt/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pgopt::CliMain(args, std::cout, std::cerr);
}

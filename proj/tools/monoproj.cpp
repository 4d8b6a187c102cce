#include <iostream>
#include <string>
#include <vector>

#include "monoproj/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return monoproj::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "mimm/app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mimm::app::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "psdcuts/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psdcuts::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string_view>
#include <vector>

#include "dcube/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string_view> args(argv + 1, argv + argc);
  return dcube::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "bioquake/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return bioquake::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "matterhorn/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return matterhorn::run_cli(args, std::cout, std::cerr);
}

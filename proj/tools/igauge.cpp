#include <iostream>
#include <string>
#include <vector>

#include "igauge/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  const std::vector<std::string> args(argv + 1, argv + argc);
  return igauge::run_command(args, std::cout, std::cerr);
}

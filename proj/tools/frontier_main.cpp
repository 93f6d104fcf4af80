#include <iostream>

#include "frontier/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return frontier::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}

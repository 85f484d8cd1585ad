#include <iostream>

#include "symtest/cli.hpp"

int main(int argc, char** argv) {
  return symtest::cli::run_cli(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "wpgen/cli.hpp"

int main(int argc, char** argv) {
  return wpgen::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}

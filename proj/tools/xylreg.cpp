#include <iostream>

#include "xylreg/cli.hpp"

int main(int argc, char** argv) {
  return xylreg::cli::run(argc, argv, std::cout, std::cerr);
}

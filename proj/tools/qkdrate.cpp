#include <iostream>

#include "qkdrate/cli.hpp"

int main(int argc, char** argv) {
  return qkdrate::run_cli(argc, argv, std::cout, std::cerr);
}

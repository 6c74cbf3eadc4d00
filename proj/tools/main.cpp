#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  cityscan::cli::configure_logging();
  return cityscan::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}

#include "bellcompat/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return bellcompat::run_command({argv, argv + argc}, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "rfid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rfid::cli::run(args, std::cout, std::cerr);
}

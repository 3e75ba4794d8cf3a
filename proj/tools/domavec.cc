#include <iostream>
#include <string>
#include <vector>

#include "domavec/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return domavec::RunCli(args, std::cout, std::cerr);
}

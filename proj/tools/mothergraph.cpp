#include <iostream>
#include <string>
#include <vector>

#include "mothergraph/cli.hpp"

int main(int argc, char** argv) {
  return mg::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

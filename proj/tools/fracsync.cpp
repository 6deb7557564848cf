#include <iostream>
#include <string>
#include <vector>

#include "fracsync/cli/commands.hpp"

int main(int argc, char** argv) {
  return fracsync::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

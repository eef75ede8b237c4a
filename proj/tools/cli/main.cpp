#include <iostream>
#include <string>
#include <vector>

#include "noetherlab/cli/app.hpp"

int main(int argc, char** argv) {
  return noetherlab::cli::run_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "abhsf/cli.hpp"

int main(int argc, char** argv) {
  return abhsf::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

#include <iostream>

#include "dirac_cli/commands.hpp"

int main(int argc, char** argv) { return dirac::cli::run(argc, argv, std::cout, std::cerr); }

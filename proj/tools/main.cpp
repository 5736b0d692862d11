#include <iostream>

#include "phasorctl/cli.hpp"

int main(int argc, char** argv) { return phasorctl::cli::main(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "fluctuator/cli.hpp"

int main(int argc, char** argv) { return fluct::cli::main(argc, argv, std::cout, std::cerr); }

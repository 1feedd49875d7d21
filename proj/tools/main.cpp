#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bivect::cli::main(argc, argv, std::cout, std::cerr); }

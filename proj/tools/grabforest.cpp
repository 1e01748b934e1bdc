#include <iostream>

#include "grabforest/cli.hpp"

int main(int argc, char** argv) { return grabforest::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "xling/cli.hpp"

int main(int argc, char** argv) { return xling::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "soen/cli.hpp"

int main(int argc, char** argv) { return soen::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "physid/cli.hpp"

int main(int argc, char** argv) { return physid::run_cli(argc, argv, std::cout, std::cerr); }

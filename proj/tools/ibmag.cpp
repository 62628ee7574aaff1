#include "ibmag/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ibmag::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "dym/cli.hpp"

int main(int argc, char** argv) { return dym::run_cli(argc, argv, std::cout, std::cerr); }

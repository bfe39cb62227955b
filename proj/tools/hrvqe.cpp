#include <iostream>

#include "hrvqe/cli.hpp"

int main(int argc, char** argv) { return hrvqe::run_cli(argc, argv, std::cout, std::cerr); }

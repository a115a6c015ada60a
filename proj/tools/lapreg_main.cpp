#include <iostream>

#include "lapreg/cli.hpp"

int main(int argc, char** argv) { return lapreg::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "deepesn/cli.hpp"

int main(int argc, char** argv) { return deepesn::run_cli(argc, argv, std::cout, std::cerr); }

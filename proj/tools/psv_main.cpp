#include <iostream>

#include "psv/cli.hpp"

int main(int argc, char** argv) { return psv::cli::run(argc, argv, std::cout, std::cerr); }

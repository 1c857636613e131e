#include <iostream>

#include "cade/cli.hpp"

int main(int argc, char** argv) { return cade::cli::run(argc, argv, std::cout, std::cerr); }

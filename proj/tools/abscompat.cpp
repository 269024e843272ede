#include <iostream>

#include "abscompat/cli.hpp"

int main(int argc, char** argv) { return abscompat::cli::run(argc, argv, std::cout, std::cerr); }

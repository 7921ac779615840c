#include <iostream>

#include "rtower/cli.hpp"

int main(int argc, char** argv) { return rtower::cli::run(argc, argv, std::cout, std::cerr); }

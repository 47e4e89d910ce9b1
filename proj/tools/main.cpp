#include <iostream>

#include "timesplit/cli.hpp"

int main(int argc, char** argv) { return timesplit::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "sqq/cli.hpp"

int main(int argc, char** argv) { return sqq::parse_and_run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "sbm/cli.h"

int main(int argc, char** argv) { return sbm::run_cli(argc, argv, std::cout, std::cerr); }

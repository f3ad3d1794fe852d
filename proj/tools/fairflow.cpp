#include <iostream>

#include "fairflow/cli.hpp"

int main(int argc, char** argv) { return fairflow::cli::run(argc, argv, std::cout, std::cerr); }

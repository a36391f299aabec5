#include <iostream>

#include "wisheig/cli/commands.hpp"

int main(int argc, char** argv) { return wisheig::cli::run_cli(argc, argv, std::cout, std::cerr); }

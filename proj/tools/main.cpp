#include <iostream>

#include "latline_cli/commands.hpp"

int main(int argc, char** argv) { return latline::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "betanorm/cli.hpp"

int main(int argc, char** argv) { return betanorm::cli::main_entry(argc, argv, std::cout, std::cerr); }

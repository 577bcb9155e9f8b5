#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return steinvar::cli::main_entry(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "ksdiff/cli.hpp"

int main(int argc, char** argv) { return ksdiff::cli::run(argc, argv, std::cout, std::cerr); }

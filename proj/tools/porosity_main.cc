#include <iostream>

#include "porosity/cli.h"

int main(int argc, char** argv) { return porosity::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "lot/cli/app.hpp"

int main(int argc, char** argv) { return lot::cli::run(argc, argv, std::cout, std::cerr); }

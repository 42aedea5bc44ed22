#include <iostream>

#include "jkl/cli/app.hpp"

int main(int argc, char** argv) { return jkl::cli::run(argc, argv, std::cout, std::cerr); }

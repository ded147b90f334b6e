#include <iostream>

#include "isoembed/cli.hpp"

int main(int argc, char** argv) { return isoembed::cli::run(argc, argv, std::cout, std::cerr); }

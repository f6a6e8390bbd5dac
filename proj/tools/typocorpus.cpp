#include <iostream>

#include "typocorpus/cli.hpp"

int main(int argc, char** argv) { return typocorpus::cli::run(argc, argv, std::cout, std::cerr); }

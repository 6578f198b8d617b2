#include <iostream>

#include "quizgen/cli.hpp"

int main(int argc, char** argv) { return quizgen::run_cli(argc, argv, std::cin, std::cout, std::cerr); }

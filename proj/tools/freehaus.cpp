#include <iostream>

#include "freehaus/run.hpp"

int main(int argc, char** argv) { return freehaus::run_cli(argc, argv, std::cout, std::cerr); }

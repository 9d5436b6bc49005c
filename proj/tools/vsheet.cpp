#include <iostream>

#include "vsheet/cli.hpp"

int main(int argc, char** argv) { return vsheet::dispatch(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "exlat/cli.hpp"

int main(int argc, char** argv) { return exlat::cli::dispatch(argc, argv, std::cout, std::cerr); }

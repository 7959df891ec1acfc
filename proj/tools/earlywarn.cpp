#include <iostream>

#include "earlywarn/cli.hpp"

int main(int argc, char** argv) { return earlywarn::cli::dispatch(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "sps/cli.hpp"

int main(int argc, char** argv) { return sps::cli::run(argc, argv, std::cout); }

#include <iostream>

#include "erlang/cli.hpp"

int main(int argc, char** argv) { return erlang::cli::main(argc, argv, std::cout, std::cerr); }

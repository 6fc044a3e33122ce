#include <iostream>

#include "uiknow/cli.hpp"

int main(int argc, char** argv) { return uiknow::cli::dispatch(argc, argv, std::cout, std::cerr); }

#include "cbtau_tools/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cbtau::tools::run_cli(argc, argv, std::cout, std::cerr); }

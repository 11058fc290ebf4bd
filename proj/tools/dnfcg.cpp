#include <iostream>

#include "dnfcg/cli.hpp"

int main(int argc, char** argv) { return dnfcg::cli::run(argc, argv, std::cout, std::cerr); }

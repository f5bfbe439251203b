#include <iostream>

#include "ordcover/harness/cli.hpp"

int main(int argc, char** argv) { return ordcover::harness::run(argc, argv, std::cout, std::cerr); }

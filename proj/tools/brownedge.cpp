#include <brownedge/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return brownedge::run(argc, argv, std::cout, std::cerr); }

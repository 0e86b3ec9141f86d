#include <iostream>

#include "qsg/cli.hpp"

int main(int argc, char** argv) { return qsg::run_cli(argc, argv, std::cout, std::cerr); }

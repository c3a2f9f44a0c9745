#include "beaconplan/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return beaconplan::run_cli(argc, argv, std::cout, std::cerr); }

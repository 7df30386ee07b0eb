#include <iostream>
#include <string>
#include <vector>

#include "leocap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return leocap::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "pooling/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pooling::cli_main(args, std::cout, std::cerr);
}

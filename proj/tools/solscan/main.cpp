#include <iostream>
#include <string>
#include <vector>

#include "solscan/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return solscan::cli::run(args, std::cout, std::cerr);
}

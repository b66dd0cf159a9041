// contractcheck - analyze .spa contracts from the command line.

#include <exception>
#include <iostream>
#include <vector>

#include "contractcheck/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return contractcheck::run_cli(args, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}

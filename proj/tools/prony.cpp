#include <iostream>
#include <string>
#include <vector>

#include "prony/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return prony::cli::run(args, std::cout, std::cerr);
}

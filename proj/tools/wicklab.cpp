#include <iostream>
#include <string>
#include <vector>

#include "wicklab/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wicklab::cli::main(args, std::cout, std::cerr);
}

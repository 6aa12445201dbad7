#include "delaycomp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return delaycomp::cli::main(argc, argv, std::cout, std::cerr);
}

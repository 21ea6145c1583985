#include <iostream>

#include "decaystream/cli.hpp"

int main(int argc, char** argv) {
    return decaystream::cli::main_entry(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "modecoupler/cli.hpp"

int main(int argc, char** argv) {
    return modecoupler::cli::run(argc, argv, std::cout, std::cerr);
}

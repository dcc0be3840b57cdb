#include <iostream>

#include "usm/cli.hpp"

int main(int argc, char** argv) {
    return usm::cli::run(argc, argv, std::cout, std::cerr);
}

#include "patchsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return patchsim::cli::run({argv, argv + argc}, std::cout, std::cerr);
}

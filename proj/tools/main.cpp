#include <iostream>

#include "fluorospec/cli/app.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return fluorospec::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}

#include <iostream>

#include "lcgadget/cli.hpp"

int main(int argc, char** argv) {
    return lcg::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

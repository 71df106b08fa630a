#include <iostream>

#include "mch2/cli.hpp"

int main(int argc, char** argv) {
    return mch2::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

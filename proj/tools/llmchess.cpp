#include <iostream>

#include "llmchess/cli/cli.hpp"

int main(int argc, char** argv) {
    return llmchess::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "multierg/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return multierg::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "logprose/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return logprose::run(args, std::cout, std::cerr);
}

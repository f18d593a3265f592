// main.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return pika::run_cli(args, std::cout, std::cerr);
}

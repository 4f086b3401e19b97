#include <iostream>
#include <string>
#include <vector>

#include "ctrlgrad/cli.hpp"

int main(int argc, char** argv)
{
    return ctrlgrad::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

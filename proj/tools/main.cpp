#include <iostream>

#include "meandim/cli.hpp"

int main(int argc, char** argv)
{
    return meandim::run_cli(argc, argv, std::cout, std::cerr);
}

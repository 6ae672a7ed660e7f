#include "simbeam/cli.hpp"

int main(int argc, char** argv)
{
    return simbeam::cli_main(argc, argv);
}

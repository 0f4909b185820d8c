#include "harness/cli.hpp"

int main(int argc, char** argv)
{
    return lossless::harness::run_cli(argc, argv);
}

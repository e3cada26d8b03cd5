#include "skilldtw/cli.hpp"

int main(int argc, char** argv)
{
    return skilldtw::run_cli(argc, argv);
}

#include "nxbench/cli.hpp"

int main(int argc, char** argv) { return nxbench::run_cli(argc, argv); }

#include "dynrg/cli.hpp"

int main(int argc, char** argv) { return dynrg::cli_dispatch(argc, argv); }

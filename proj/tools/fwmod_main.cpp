#include "fwmod/cli.hpp"

int main(int argc, char** argv) { return fwmod::cli_main(argc, argv); }

#include "gtdyn/cli.hpp"

int main(int argc, char** argv) { return gtdyn::cli_main(argc, argv); }

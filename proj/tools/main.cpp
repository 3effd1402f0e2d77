#include "kgloc/cli.hpp"

int main(int argc, char** argv) { return kgloc::cli_main(argc, argv); }

#include "bagbound/cli.hpp"

int main(int argc, char** argv) { return bagbound::cli_main(argc, argv); }

// CLI entry point; subcommands are wired up in src/cli.cpp.
#include "sigtraj/cli.hpp"

int main(int argc, char** argv) { return sigtraj::run_cli(argc, argv); }

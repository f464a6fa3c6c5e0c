#include "smc/cli/commands.hpp"

int main(int argc, char** argv) { return smc::cli::run_cli(argc, argv); }

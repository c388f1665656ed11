#include "iceline/cli.hpp"

int main(int argc, char** argv) { return iceline::cli::run_cli(argc, argv); }

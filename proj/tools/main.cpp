#include "cli.hpp"

int main(int argc, char** argv) { return tetforge::cli::run_cli(argc, argv); }

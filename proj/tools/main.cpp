#include "cabandit/cli.hpp"

int main(int argc, char** argv) { return cabandit::cli::run_cli(argc, argv); }

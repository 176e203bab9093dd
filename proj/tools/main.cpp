#include "cli.hpp"

int main(int argc, char** argv) { return qlab::cli::run_cli(argc, argv); }

#include "cfpc/cli.hpp"

int main(int argc, char** argv) { return cfpc::run_cli(argc, argv); }

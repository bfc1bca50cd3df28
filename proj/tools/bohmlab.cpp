#include "bohmlab/lab/cli.hpp"

int main(int argc, char** argv) { return bohmlab::lab::run_cli(argc, argv); }

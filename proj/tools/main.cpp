#include "fsir/cli.hpp"

int main(int argc, char** argv) { return fsir::run_cli(argc, argv); }

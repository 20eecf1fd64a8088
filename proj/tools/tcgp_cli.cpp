#include "tcgp/cli.hpp"

int main(int argc, char** argv) { return tcgp::run_command(argc, argv); }

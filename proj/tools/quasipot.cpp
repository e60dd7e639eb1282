#include "quasipot/cli.hpp"

int main(int argc, char** argv) { return quasipot::cli::run(argc, argv); }

#include "revlat/cli.hpp"

int main(int argc, char** argv) { return revlat::cli::main(argc, argv); }

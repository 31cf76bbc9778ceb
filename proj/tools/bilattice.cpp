// bilattice.cpp — command-line entry point

#include "bilayer/cli.hpp"

int main(int argc, char** argv) { return bilayer::cli::run(argc, argv); }

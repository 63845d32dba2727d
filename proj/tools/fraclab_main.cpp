#include "fraclab/cli.hpp"

int main(int argc, char** argv) { return fraclab::cli::main_entry(argc, argv); }

#include "symclone/cli.hpp"

int main(int argc, char** argv) { return symclone::cli::run(argc, argv); }

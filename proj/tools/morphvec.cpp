#include "morphvec/cli.hpp"

int main(int argc, char** argv) { return morphvec::cli::run(argc, argv); }

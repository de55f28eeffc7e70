#include "lidc/cli.hpp"

int main(int argc, char** argv) { return lidc::cli::run(argc, argv); }

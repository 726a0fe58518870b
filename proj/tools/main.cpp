#include "brokenpde/cli.hpp"

int main(int argc, char** argv) { return brokenpde::cli::run(argc, argv); }

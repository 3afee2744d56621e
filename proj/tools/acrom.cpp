#include "acrom/cli.hpp"

int main(int argc, char** argv) { return acrom::cli::run(argc, argv); }

#include "twirl/cli.hpp"

int main(int argc, char** argv) { return twirl::cli::run(argc, argv); }

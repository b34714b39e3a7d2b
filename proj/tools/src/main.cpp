#include "s4is/cli.hpp"

int main(int argc, char** argv) { return s4is::cli::main(argc, argv); }

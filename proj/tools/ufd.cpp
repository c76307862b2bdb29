#include "cli.hpp"

int main(int argc, char** argv) { return ufd::cli::main(argc, argv); }

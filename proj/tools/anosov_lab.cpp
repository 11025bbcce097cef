#include "anosov/cli.hpp"

int main(int argc, char** argv) { return anosov::cli::main_entry(argc, argv); }

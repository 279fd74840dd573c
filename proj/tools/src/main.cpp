#include "duks/cli/commands.hpp"

int main(int argc, char** argv) { return duks::cli::main_entry(argc, argv); }

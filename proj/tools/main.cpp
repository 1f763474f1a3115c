#include "cli.hpp"

int main(int argc, char** argv) { return movdom::cli::main_entry(argc, argv); }

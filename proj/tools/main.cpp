#include "cli.hpp"

int main(int argc, char** argv) { return meanrev::cli::main_entry(argc, argv); }

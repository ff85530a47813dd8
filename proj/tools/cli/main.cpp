#include "commands.hpp"

int main(int argc, char** argv) { return tvckit::cli::main(argc, argv); }

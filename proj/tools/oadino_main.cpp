#include "oadino/cli.hpp"

int main(int argc, char** argv) { return oadino::cli::run(argc, argv); }

#include "race/cli.hpp"

int main(int argc, char** argv) { return race::cli::run(argc, argv); }

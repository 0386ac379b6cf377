#include "perimode/cli.hpp"

int main(int argc, char** argv) { return perimode::run_main(argc, argv); }

#include "ail/cli.hpp"

int main(int argc, char** argv) { return ail::cli_main(argc, argv); }

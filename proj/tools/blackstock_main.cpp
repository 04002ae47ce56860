#include "blackstock/cli.hpp"

int main(int argc, char** argv) { return blackstock::cli_main(argc, argv); }

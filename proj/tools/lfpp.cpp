#include "lfpp_cli.hpp"

int main(int argc, char** argv) { return lfpp::cli::main(argc, argv); }

#include "sqsl/cli.hpp"

int main(int argc, char** argv) { return sqsl::cli_main(argc, argv); }

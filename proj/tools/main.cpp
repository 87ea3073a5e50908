#include "sqap/cli.hpp"

int main(int argc, char** argv) { return sqap::cli_main(argc, argv); }

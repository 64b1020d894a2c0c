#include "mldiff/campaign/cli.hpp"

int main(int argc, char** argv) { return mldiff::campaign::cli_main(argc, argv); }

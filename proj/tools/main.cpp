#include "admg/cli.hpp"

int main(int argc, char** argv) { return admg::cli::run(argc, argv); }

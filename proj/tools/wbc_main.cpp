#include "wbc/cli.hpp"

int main(int argc, char** argv) { return wbc::cli::run(argc, argv); }

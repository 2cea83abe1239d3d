#include "ghkit/cli.hpp"

int main(int argc, char** argv) { return ghkit::cli::run_main(argc, argv); }

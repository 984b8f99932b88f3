#include "pflow/cli.hpp"

int main(int argc, char** argv) { return pflow::cli::run_main(argc, argv); }

#include "gsml_cli/cli.hpp"

int main(int argc, char** argv) { return gsml::cli::run_main(argc, argv); }

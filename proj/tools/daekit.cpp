#include "daekit/cli.hpp"

int main(int argc, char** argv) { return daekit::cli::run(argc, argv); }

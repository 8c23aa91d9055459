#include "mrm/cli.hpp"

int main(int argc, char** argv) { return mrm::cli::run(argc, argv); }

#include "qbm/cli/commands.hpp"

int main(int argc, char** argv) { return qbm::cli::run(argc, argv); }

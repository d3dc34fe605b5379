#include "kilm/cli/app.hpp"

int main(int argc, char** argv) { return kilm::cli::run(argc, argv); }

#pragma once

#include <string>
#include <vector>

namespace kilm::cli {

// Parses arguments (without the program name), runs the subcommand, writes
// run_manifest.json, and returns the process exit code. Errors are reported
// on stderr as one JSON object.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace kilm::cli

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kilm/util/jsonl.hpp"

namespace kilm::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kManifestFile = "run_manifest.json";

struct Manifest {
  std::string command;
  Json config = Json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;  // relative to the output directory
  Json report = Json::object();
};

// Writes run_manifest.json into out_dir with sha256 of every input and output
// file (directories list their regular files in name order).
void write_manifest(const std::filesystem::path& out_dir, const Manifest& m);

}  // namespace kilm::cli

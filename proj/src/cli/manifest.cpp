#include "kilm/cli/manifest.hpp"

#include <algorithm>

#include "kilm/util/sha256.hpp"

namespace kilm::cli {

namespace {

Json hash_entry(const std::filesystem::path& shown, const std::filesystem::path& actual) {
  Json j;
  j["path"] = shown.generic_string();
  if (std::filesystem::is_directory(actual)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(actual)) {
      if (e.is_regular_file() && e.path().filename() != kManifestFile) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    Json list = Json::array();
    for (const auto& f : files) list.push_back({{"path", f.filename().generic_string()}, {"sha256", sha256_file(f)}});
    j["files"] = std::move(list);
  } else {
    j["sha256"] = sha256_file(actual);
  }
  return j;
}

}  // namespace

void write_manifest(const std::filesystem::path& out_dir, const Manifest& m) {
  Json j;
  j["tool"] = "kilm";
  j["version"] = kVersion;
  j["command"] = m.command;
  j["config"] = m.config;
  Json inputs = Json::array();
  for (const auto& p : m.inputs) inputs.push_back(hash_entry(p, p));
  j["inputs"] = std::move(inputs);
  Json outputs = Json::array();
  for (const auto& p : m.outputs) outputs.push_back(hash_entry(p, out_dir / p));
  j["outputs"] = std::move(outputs);
  j["report"] = m.report;
  write_json_file(out_dir / kManifestFile, j);
}

}  // namespace kilm::cli

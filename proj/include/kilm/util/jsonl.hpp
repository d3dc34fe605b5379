#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "json.hpp"

namespace kilm {

using Json = nlohmann::ordered_json;

// Calls fn(record, line_number) for every non-blank line. Parse failures throw
// FormatError naming the file and line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);

  void write(const Json& record);
  void close();
  std::size_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

}  // namespace kilm

#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kilm/ingest/slicing.hpp"
#include "kilm/tokenizer.hpp"

namespace kilm::test {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& rel) { return fs::path(KILM_FIXTURES_DIR) / rel; }

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("kilm_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Slice over the tokens of `text` with mentions given as token ranges.
inline ingest::DocumentSlice make_slice(const std::string& text, std::vector<ingest::MentionSpan> mentions = {},
                                        std::string doc_id = "1") {
  ingest::DocumentSlice s;
  s.doc_id = std::move(doc_id);
  s.title = "Doc " + s.doc_id;
  s.tokens = tokenize_tokens(text);
  for (auto& m : mentions) {
    if (m.surface.empty()) {
      std::vector<Token> span(s.tokens.begin() + static_cast<std::ptrdiff_t>(m.token_start),
                              s.tokens.begin() + static_cast<std::ptrdiff_t>(m.token_end));
      m.surface = render(span);
    }
  }
  s.mentions = std::move(mentions);
  return s;
}

// Position of the first token equal to `word`.
inline std::size_t token_index(const ingest::DocumentSlice& s, const std::string& word) {
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (s.tokens[i].text == word) return i;
  }
  return s.tokens.size();
}

}  // namespace kilm::test

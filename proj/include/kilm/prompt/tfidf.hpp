#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kilm::prompt {

// Lowercased words with ASCII punctuation treated as whitespace.
std::vector<std::string> tfidf_terms(std::string_view text);

struct Retrieved {
  std::size_t index = 0;
  double score = 0.0;
};

// Raw term frequency, idf = ln(N / df), cosine similarity. Read-only after
// construction.
class TfidfIndex {
 public:
  explicit TfidfIndex(const std::vector<std::string>& documents);

  // Top k by cosine, ties by document order. k >= size returns all.
  std::vector<Retrieved> query(std::string_view text, std::size_t k) const;

  std::size_t size() const { return docs_.size(); }
  double idf(const std::string& term) const;

 private:
  using Vector = std::vector<std::pair<std::size_t, double>>;  // term id -> weight, sorted by id
  Vector vectorize(std::string_view text) const;

  std::unordered_map<std::string, std::size_t> vocab_;
  std::vector<double> idf_;
  std::vector<Vector> docs_;
  std::vector<double> norms_;
};

}  // namespace kilm::prompt

#include "kilm/prompt/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kilm/tokenizer.hpp"

namespace kilm::prompt {

std::vector<std::string> tfidf_terms(std::string_view text) {
  std::string cleaned = to_lower_ascii(text);
  for (auto& c : cleaned) {
    if (is_ascii_punct(c)) c = ' ';
  }
  return split_whitespace(cleaned);
}

TfidfIndex::TfidfIndex(const std::vector<std::string>& documents) {
  std::vector<std::map<std::size_t, std::size_t>> counts;
  counts.reserve(documents.size());
  std::vector<std::size_t> df;
  for (const auto& d : documents) {
    std::map<std::size_t, std::size_t> tf;
    for (auto& term : tfidf_terms(d)) {
      auto [it, inserted] = vocab_.emplace(std::move(term), vocab_.size());
      if (inserted) df.push_back(0);
      if (tf[it->second]++ == 0) ++df[it->second];
    }
    counts.push_back(std::move(tf));
  }
  const double n = static_cast<double>(documents.size());
  idf_.resize(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) idf_[t] = std::log(n / static_cast<double>(df[t]));
  for (const auto& tf : counts) {
    Vector v;
    double norm = 0.0;
    for (auto [t, c] : tf) {
      const double w = static_cast<double>(c) * idf_[t];
      v.emplace_back(t, w);
      norm += w * w;
    }
    docs_.push_back(std::move(v));
    norms_.push_back(std::sqrt(norm));
  }
}

double TfidfIndex::idf(const std::string& term) const {
  auto it = vocab_.find(term);
  return it == vocab_.end() ? 0.0 : idf_[it->second];
}

TfidfIndex::Vector TfidfIndex::vectorize(std::string_view text) const {
  std::map<std::size_t, std::size_t> tf;
  for (const auto& term : tfidf_terms(text)) {
    if (auto it = vocab_.find(term); it != vocab_.end()) ++tf[it->second];
  }
  Vector v;
  for (auto [t, c] : tf) v.emplace_back(t, static_cast<double>(c) * idf_[t]);
  return v;
}

std::vector<Retrieved> TfidfIndex::query(std::string_view text, std::size_t k) const {
  const Vector q = vectorize(text);
  double qnorm = 0.0;
  for (auto [t, w] : q) qnorm += w * w;
  qnorm = std::sqrt(qnorm);

  std::vector<Retrieved> scored;
  scored.reserve(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    double dot = 0.0;
    const auto& v = docs_[d];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < q.size() && j < v.size()) {
      if (q[i].first < v[j].first) {
        ++i;
      } else if (v[j].first < q[i].first) {
        ++j;
      } else {
        dot += q[i++].second * v[j++].second;
      }
    }
    const double denom = qnorm * norms_[d];
    scored.push_back({d, denom > 0.0 ? dot / denom : 0.0});
  }
  // Scores equal to 12 decimals are ties and keep pool order.
  auto key = [](double s) { return std::llround(s * 1e12); };
  std::stable_sort(scored.begin(), scored.end(),
                   [&](const Retrieved& a, const Retrieved& b) { return key(a.score) > key(b.score); });
  if (k < scored.size()) scored.resize(k);
  return scored;
}

}  // namespace kilm::prompt

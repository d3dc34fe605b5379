#include "kilm/ingest/slicing.hpp"

#include <algorithm>
#include <stdexcept>

#include "kilm/error.hpp"

namespace kilm::ingest {

std::string_view to_string(SliceMode mode) {
  return mode == SliceMode::Primary ? "primary" : "upscaling";
}

SliceMode slice_mode_from(std::string_view s) {
  if (s == "primary") return SliceMode::Primary;
  if (s == "upscaling") return SliceMode::Upscaling;
  throw ConfigError("unknown slice mode '" + std::string(s) + "' (expected primary|upscaling)");
}

std::vector<DocumentSlice> slice_documents(const ParsedArticle& article, std::size_t stride,
                                           SliceMode mode) {
  if (stride < kMinStride) {
    throw std::invalid_argument("stride must be >= " + std::to_string(kMinStride));
  }
  const std::size_t limit = mode == SliceMode::Primary
                                ? std::min(article.summary_end, article.clean_text.size())
                                : article.clean_text.size();
  std::string_view text = std::string_view(article.clean_text).substr(0, limit);

  std::vector<std::size_t> breaks;
  for (const auto& link : article.links) {
    if (link.end > limit) continue;
    breaks.push_back(link.start);
    breaks.push_back(link.end);
  }
  std::sort(breaks.begin(), breaks.end());
  TokenizedText tt = tokenize(text, breaks);

  // Map each link onto the tokens it covers exactly.
  struct TokenMention {
    std::size_t begin;
    std::size_t end;
    const LinkSpan* link;
  };
  std::vector<TokenMention> mentions;
  std::size_t cursor = 0;
  for (const auto& link : article.links) {
    if (link.end > limit || link.target_title.empty()) continue;
    while (cursor < tt.offsets.size() && tt.offsets[cursor].start < link.start) ++cursor;
    std::size_t b = cursor;
    std::size_t e = b;
    while (e < tt.offsets.size() && tt.offsets[e].end <= link.end) ++e;
    if (e == b || tt.offsets[b].start != link.start || tt.offsets[e - 1].end != link.end) continue;
    mentions.push_back({b, e, &link});
  }

  std::vector<DocumentSlice> slices;
  const std::size_t n = tt.tokens.size();
  for (std::size_t begin = 0, index = 0; begin < n; begin += stride, ++index) {
    const std::size_t end = std::min(n, begin + stride);
    DocumentSlice slice;
    slice.doc_id = std::to_string(article.page_id);
    slice.title = article.title;
    slice.slice_index = index;
    slice.tokens.assign(tt.tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                        tt.tokens.begin() + static_cast<std::ptrdiff_t>(end));
    for (const auto& m : mentions) {
      if (m.begin >= begin && m.end <= end) {
        slice.mentions.push_back({m.begin - begin, m.end - begin, m.link->surface, m.link->target_title});
      }
    }
    slices.push_back(std::move(slice));
  }
  return slices;
}

}  // namespace kilm::ingest

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kilm/ingest/article.hpp"
#include "kilm/tokenizer.hpp"

namespace kilm::ingest {

enum class SliceMode { Primary, Upscaling };

std::string_view to_string(SliceMode mode);
SliceMode slice_mode_from(std::string_view s);

inline constexpr std::size_t kDefaultStride = 512;
inline constexpr std::size_t kMinStride = 16;

// Entity mention in token coordinates relative to its slice: [token_start, token_end).
struct MentionSpan {
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string surface;
  std::string entity;

  friend bool operator==(const MentionSpan&, const MentionSpan&) = default;
};

struct DocumentSlice {
  std::string doc_id;
  std::string title;
  std::size_t slice_index = 0;
  std::vector<Token> tokens;
  std::vector<MentionSpan> mentions;

  friend bool operator==(const DocumentSlice&, const DocumentSlice&) = default;
};

// Splits the article (summary only in Primary mode) into consecutive,
// non-overlapping windows of at most `stride` pipeline tokens. Link spans are
// kept on token boundaries; a mention crossing a window boundary is dropped.
// Throws std::invalid_argument when stride < kMinStride.
std::vector<DocumentSlice> slice_documents(const ParsedArticle& article, std::size_t stride,
                                           SliceMode mode);

}  // namespace kilm::ingest

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kilm/ingest/dump_reader.hpp"
#include "kilm/ingest/wikitext.hpp"

namespace kilm::ingest {

enum class DescriptionSource { Template, FirstSentence };

std::string_view to_string(DescriptionSource source);
DescriptionSource description_source_from(std::string_view s);

struct ShortDescription {
  std::string text;
  DescriptionSource source = DescriptionSource::Template;

  friend bool operator==(const ShortDescription&, const ShortDescription&) = default;
};

struct ParsedArticle {
  std::int64_t page_id = 0;
  std::string title;
  std::string clean_text;
  std::vector<LinkSpan> links;
  std::optional<ShortDescription> short_description;
  std::size_t summary_end = 0;

  friend bool operator==(const ParsedArticle&, const ParsedArticle&) = default;
};

// Argument of {{Short description|...}} with markup stripped, or nullopt when
// the template is absent, empty, or "none".
std::optional<std::string> find_short_description_template(std::string_view wikitext);

// Sentence splitter used for the first-sentence fallback. Does not split
// inside parentheses, after abbreviations on a fixed list, or after single
// capital initials. Newlines always end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Template argument when present, otherwise the first sentence of at least
// three words (else the second sentence). nullopt means no description; the
// entity is then left out of the knowledge table.
std::optional<ShortDescription> extract_short_description(const RawPage& page,
                                                          std::string_view clean_text);

struct ArticleParse {
  ParsedArticle article;
  std::size_t warnings = 0;
};

ArticleParse parse_article(const RawPage& page);

}  // namespace kilm::ingest

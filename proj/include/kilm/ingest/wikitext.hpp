#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kilm::ingest {

// A hyperlink mention. Offsets are UTF-8 byte offsets into the clean text and
// clean_text.substr(start, end - start) == surface.
struct LinkSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
  std::string target_title;

  friend bool operator==(const LinkSpan&, const LinkSpan&) = default;
};

struct CleanText {
  std::string clean_text;
  std::vector<LinkSpan> links;  // sorted by start, non-overlapping
  std::size_t summary_end = 0;  // offset of the first section heading, or size()
  std::size_t warnings = 0;     // malformed constructs kept as literal text
};

// Strips wikitext to plain text and records internal links. Templates, tables,
// references, comments, HTML tags and File/Image/Category/interlanguage links
// are removed; section headings are dropped and mark the summary boundary.
CleanText extract_links(std::string_view wikitext);

// Removes block constructs that never contribute text (comments, <ref> and
// similar tags, templates, tables, file/category links) and decodes HTML
// entities. Exposed for the short-description path.
std::string strip_blocks(std::string_view wikitext, std::size_t& warnings);

// MediaWiki title normalization: underscores become spaces, runs of spaces
// collapse, a leading ':' is dropped and the first ASCII letter is upper-cased.
std::string canonical_title(std::string_view title);

// Appends the UTF-8 encoding of a code point.
void append_utf8(std::string& out, char32_t cp);

}  // namespace kilm::ingest

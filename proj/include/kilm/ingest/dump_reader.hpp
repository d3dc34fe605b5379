#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kilm::ingest {

struct RawPage {
  std::string title;
  std::int64_t page_id = 0;
  int ns = 0;
  std::string wikitext;
  bool is_redirect = false;
  std::string redirect_target;  // raw target title when is_redirect
};

enum class Compression { None, Bzip2, Gzip };

// Classifies the leading bytes of a stream ("BZh" or 1f 8b).
Compression detect_compression(std::string_view magic);

// Streaming reader over a MediaWiki pages-articles XML export. Yields
// namespace-0 pages in document order, holding at most one page of text plus
// one input chunk in memory.
//
// Errors are DumpError with the byte offset into the (decompressed) XML. Pages
// completed before a parse error are still returned; the error is raised on
// the call after the last complete page.
class DumpReader {
 public:
  explicit DumpReader(const std::filesystem::path& path);
  // The stream must outlive the reader. Compression is detected when the
  // stream is seekable; otherwise plain XML is assumed.
  explicit DumpReader(std::istream& in);
  ~DumpReader();

  DumpReader(const DumpReader&) = delete;
  DumpReader& operator=(const DumpReader&) = delete;

  std::optional<RawPage> next();

  Compression compression() const;
  std::size_t skipped_non_article_pages() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<RawPage> parse_dump(std::istream& in);

// Parses `#REDIRECT [[Target]]` (case-insensitive, leading whitespace allowed).
std::optional<std::string> parse_redirect_markup(std::string_view wikitext);

}  // namespace kilm::ingest

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "kilm/ingest/slicing.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::ingest {

struct IngestOptions {
  std::filesystem::path dump;
  std::filesystem::path out_dir;
  std::size_t stride = kDefaultStride;
  SliceMode mode = SliceMode::Primary;
  unsigned jobs = 1;
  std::optional<std::string> skip_title_regex;
};

struct IngestReport {
  std::size_t pages = 0;
  std::size_t articles = 0;
  std::size_t redirects = 0;
  std::size_t skipped_by_regex = 0;
  std::size_t non_article_pages = 0;
  std::size_t markup_warnings = 0;
  std::size_t knowledge_entries = 0;
  std::size_t knowledge_conflicts = 0;
  std::size_t skipped_no_description = 0;
  std::size_t slices = 0;

  Json to_json() const;
};

// Dump -> articles.jsonl, knowledge_table.jsonl, redirects.jsonl,
// slices.jsonl, stats.json under out_dir. Per-article work runs on `jobs`
// threads; output order is page-id order regardless of job count.
IngestReport run_ingest(const IngestOptions& options);

}  // namespace kilm::ingest

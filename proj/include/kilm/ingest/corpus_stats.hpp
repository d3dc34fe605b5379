#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/slicing.hpp"

namespace kilm::ingest {

struct CorpusStats {
  std::map<std::string, std::size_t> entity_frequency;  // mentions of entities with descriptions
  std::size_t slice_count = 0;
  std::size_t mention_count = 0;
  std::size_t knowledge_entries = 0;
  double mean_description_words = 0.0;
  std::size_t stride = kDefaultStride;

  // Share of a stride-long sequence taken by an inserted description:
  // mean / (stride + mean).
  double description_overhead() const;
  double singleton_entity_fraction() const;
  std::size_t entities_with_frequency_above(std::size_t n) const;
  std::size_t frequency_of(const std::string& entity) const;
};

// Streaming accumulator so slices need not be held in memory.
class CorpusStatsBuilder {
 public:
  CorpusStatsBuilder(const KnowledgeTable& table, std::size_t stride);
  void add(const DocumentSlice& slice);
  CorpusStats finish() const;

 private:
  const KnowledgeTable& table_;
  CorpusStats stats_;
};

double mean_description_words(const KnowledgeTable& table);

CorpusStats corpus_stats(std::span<const DocumentSlice> slices, const KnowledgeTable& table,
                         std::size_t stride = kDefaultStride);

}  // namespace kilm::ingest

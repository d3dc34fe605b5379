#include "kilm/ingest/corpus_stats.hpp"

#include "kilm/tokenizer.hpp"

namespace kilm::ingest {

double CorpusStats::description_overhead() const {
  const double denom = static_cast<double>(stride) + mean_description_words;
  return denom > 0.0 ? mean_description_words / denom : 0.0;
}

double CorpusStats::singleton_entity_fraction() const {
  if (entity_frequency.empty()) return 0.0;
  std::size_t singles = 0;
  for (const auto& [_, n] : entity_frequency) singles += (n == 1);
  return static_cast<double>(singles) / static_cast<double>(entity_frequency.size());
}

std::size_t CorpusStats::entities_with_frequency_above(std::size_t n) const {
  std::size_t count = 0;
  for (const auto& [_, f] : entity_frequency) count += (f > n);
  return count;
}

std::size_t CorpusStats::frequency_of(const std::string& entity) const {
  auto it = entity_frequency.find(entity);
  return it == entity_frequency.end() ? 0 : it->second;
}

double mean_description_words(const KnowledgeTable& table) {
  if (table.size() == 0) return 0.0;
  std::size_t words = 0;
  for (const auto& e : table.entries()) words += count_words(e.description);
  return static_cast<double>(words) / static_cast<double>(table.size());
}

CorpusStatsBuilder::CorpusStatsBuilder(const KnowledgeTable& table, std::size_t stride) : table_(table) {
  stats_.stride = stride;
  stats_.knowledge_entries = table.size();
  stats_.mean_description_words = mean_description_words(table);
}

void CorpusStatsBuilder::add(const DocumentSlice& slice) {
  ++stats_.slice_count;
  for (const auto& m : slice.mentions) {
    if (!table_.contains(m.entity)) continue;
    ++stats_.entity_frequency[m.entity];
    ++stats_.mention_count;
  }
}

CorpusStats CorpusStatsBuilder::finish() const { return stats_; }

CorpusStats corpus_stats(std::span<const DocumentSlice> slices, const KnowledgeTable& table,
                         std::size_t stride) {
  CorpusStatsBuilder builder(table, stride);
  for (const auto& s : slices) builder.add(s);
  return builder.finish();
}

}  // namespace kilm::ingest

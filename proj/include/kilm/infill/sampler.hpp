#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/slicing.hpp"
#include "kilm/util/rng.hpp"

namespace kilm::infill {

// Indices of mentions whose entity has a description in the table.
std::vector<std::size_t> eligible_mentions(const ingest::DocumentSlice& slice, const ingest::KnowledgeTable& table);

// No-repeat draw memory for one slice. A mention is not drawn again until
// every eligible mention has been drawn once; then the memory resets.
class MentionCycle {
 public:
  // Uniform over eligible indices not drawn in the current cycle.
  // nullopt when `eligible` is empty.
  std::optional<std::size_t> draw(const std::vector<std::size_t>& eligible, Rng& rng);

  const std::vector<std::size_t>& drawn() const { return drawn_; }

 private:
  std::vector<std::size_t> drawn_;
};

// Cycles keyed by (doc_id, slice_index).
class EpochSampler {
 public:
  MentionCycle& cycle(const std::string& doc_id, std::size_t slice_index);

 private:
  std::unordered_map<std::string, MentionCycle> cycles_;
};

// nullopt is the no-mention signal: the caller emits a plain sample.
std::optional<ingest::MentionSpan> sample_entity(const ingest::DocumentSlice& slice, MentionCycle& cycle,
                                                 const ingest::KnowledgeTable& table, Rng& rng);
std::optional<ingest::MentionSpan> sample_entity(const ingest::DocumentSlice& slice, EpochSampler& sampler,
                                                 const ingest::KnowledgeTable& table, Rng& rng);

}  // namespace kilm::infill

#include "kilm/infill/sampler.hpp"

#include <algorithm>

namespace kilm::infill {

std::vector<std::size_t> eligible_mentions(const ingest::DocumentSlice& slice, const ingest::KnowledgeTable& table) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < slice.mentions.size(); ++i) {
    const auto& m = slice.mentions[i];
    if (m.token_end <= m.token_start || m.token_end > slice.tokens.size()) continue;
    if (table.lookup(m.entity)) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> MentionCycle::draw(const std::vector<std::size_t>& eligible, Rng& rng) {
  if (eligible.empty()) return std::nullopt;
  std::vector<std::size_t> fresh;
  for (auto i : eligible) {
    if (std::find(drawn_.begin(), drawn_.end(), i) == drawn_.end()) fresh.push_back(i);
  }
  if (fresh.empty()) {
    drawn_.clear();
    fresh = eligible;
  }
  const std::size_t pick = fresh[uniform_below(rng, fresh.size())];
  drawn_.push_back(pick);
  return pick;
}

MentionCycle& EpochSampler::cycle(const std::string& doc_id, std::size_t slice_index) {
  std::string key = doc_id;
  key.push_back('\x1f');
  key += std::to_string(slice_index);
  return cycles_[key];
}

std::optional<ingest::MentionSpan> sample_entity(const ingest::DocumentSlice& slice, MentionCycle& cycle,
                                                 const ingest::KnowledgeTable& table, Rng& rng) {
  auto pick = cycle.draw(eligible_mentions(slice, table), rng);
  if (!pick) return std::nullopt;
  return slice.mentions[*pick];
}

std::optional<ingest::MentionSpan> sample_entity(const ingest::DocumentSlice& slice, EpochSampler& sampler,
                                                 const ingest::KnowledgeTable& table, Rng& rng) {
  return sample_entity(slice, sampler.cycle(slice.doc_id, slice.slice_index), table, rng);
}

}  // namespace kilm::infill

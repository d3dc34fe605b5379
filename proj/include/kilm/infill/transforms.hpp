#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kilm/infill/sample.hpp"
#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/slicing.hpp"
#include "kilm/special_tokens.hpp"
#include "kilm/util/rng.hpp"

namespace kilm::infill {

inline constexpr std::size_t kMaxLenWithKnowledge = 640;
inline constexpr double kDefaultMaskProb = 0.3;
inline constexpr double kDefaultPoissonLambda = 3.0;

// The knowledge component inserted after a mention: title <sep> description.
struct Knowledge {
  std::string title;
  std::string description;
};

Token special(SpecialToken t, bool space_before = true);

// title <sep> description as tokens; the first token carries a leading space.
std::vector<Token> knowledge_tokens(const Knowledge& k);

// Y = prefix <ent> surface </ent><ent_desc> title <sep> description </ent_desc> suffix.
// When Y exceeds max_len, suffix tokens are dropped from the right; if that is
// not enough, KnowledgeTooLongError. Throws SpanError for a mention outside
// the slice.
TrainingTarget kn_infill(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                         const Knowledge& knowledge, std::size_t max_len = kMaxLenWithKnowledge);

// Table-backed form; MissingKnowledgeError when the entity has no entry.
TrainingTarget kn_infill(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                         const ingest::KnowledgeTable& table, std::size_t max_len = kMaxLenWithKnowledge);

// Knowledge placed after the whole text:
// text-with-<ent>-markers </s></s><ent_desc> title <sep> description </ent_desc>.
TrainingTarget kn_infill_end(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                             const Knowledge& knowledge, std::size_t max_len = kMaxLenWithKnowledge);
TrainingTarget kn_infill_end(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                             const ingest::KnowledgeTable& table,
                             std::size_t max_len = kMaxLenWithKnowledge);

// All-Copy target over the given tokens.
TrainingTarget plain_target(std::vector<Token> tokens);

// Replaces the knowledge block with one <mask>. Without a block, X == Y and
// knowledge_masked is false.
CorruptedInput kn_mask(const TrainingTarget& y);

// BART-style text infilling over Copy slots only. Draws span lengths from
// Poisson(lambda), clipped to the remaining budget floor(mask_prob * #Copy)
// and to the longest run of eligible tokens; each span becomes one <mask>,
// a zero-length draw inserts a <mask>. Throws std::invalid_argument for
// mask_prob outside [0, 1) or lambda <= 0.
CorruptedInput text_mask(CorruptedInput x, Rng& rng, double mask_prob = kDefaultMaskProb,
                         double lambda = kDefaultPoissonLambda);

// floor(mask_prob * copy_tokens), robust to representation error in mask_prob.
std::size_t mask_budget(double mask_prob, std::size_t copy_tokens);

// kn_mask followed by text_mask seeded with seed_draw; replays any sample.
CorruptedInput corrupt(const TrainingTarget& y, std::uint64_t seed_draw, double mask_prob, double lambda);

LossWeights compute_loss_weights(const TrainingTarget& y, const CorruptedInput& x);

// Tokens of "<entity> is <description>." (no doubled period).
std::vector<Token> merge_transform(std::string_view entity, std::string_view description);

// Y with Marker and Knowledge tokens removed.
std::vector<Token> strip_to_copy(const TrainingTarget& y);

// Rebuilds X slots from Y and the serialized X fields; validates that X is
// derivable from Y. Throws FormatError otherwise.
std::vector<XSlot> derive_slots(const TrainingTarget& y, const std::vector<Token>& x_tokens,
                                const std::vector<InfillSpan>& spans, bool knowledge_masked);

}  // namespace kilm::infill

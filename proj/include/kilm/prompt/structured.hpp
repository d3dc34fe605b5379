#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kilm/infill/transforms.hpp"
#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/slicing.hpp"
#include "kilm/prompt/prompt.hpp"

namespace kilm::prompt {

inline constexpr std::size_t kDefaultEdWindow = 100;
inline constexpr std::size_t kDefaultMaxNewTokens = 64;

// Byte span of a mention inside its context.
struct MentionRef {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
};

struct Candidate {
  std::string title;
  std::string description;
};

struct EDInstance {
  std::string id;
  std::string context;
  MentionRef mention;
  std::vector<Candidate> candidates;
  std::optional<std::size_t> gold_index;
  std::optional<std::string> gold_title;
  bool in_kb = true;
};

struct QAExemplar {
  std::string question;
  std::vector<std::string> answers;  // first is used in exemplar lines
};

struct ClozeInstance {
  std::string id;
  std::string statement;
  std::string answer;
  std::string relation;
};

// The context as a one-mention slice cut to `window` tokens centered on the
// mention. Throws SpanError when the span does not hold the mention text.
ingest::DocumentSlice context_slice(const std::string& context, const MentionRef& mention, std::size_t window,
                                    ingest::MentionSpan& span_out);

// Encoder text, decoder prefix and knowledge continuation of
// kn_mask(kn_infill(slice, mention, knowledge)).
struct MaskedView {
  std::string encoder_text;
  std::string decoder_prefix;  // through <ent_desc>
  std::string knowledge;       // title <sep> description
};
MaskedView masked_view(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                       const infill::Knowledge& knowledge, std::size_t max_len);

Prompt build_ed_prompt(const EDInstance& inst, std::size_t candidate_index, std::size_t window = kDefaultEdWindow);
std::vector<Prompt> build_ed_prompts(const EDInstance& inst, std::size_t window = kDefaultEdWindow);

Prompt build_appositive_prompt(const std::string& id, const std::string& context, const MentionRef& entity,
                               std::size_t window = kDefaultEdWindow,
                               std::size_t max_new_tokens = kDefaultMaxNewTokens);

// Exemplars are used in the given order.
Prompt build_qa_prompt(const std::string& id, const std::string& question, const std::vector<QAExemplar>& exemplars,
                       std::size_t max_new_tokens = kDefaultMaxNewTokens);

// MissingKnowledgeError when the entity has no description.
Prompt build_desc_probe(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                        const ingest::KnowledgeTable& table, std::size_t max_new_tokens = kDefaultMaxNewTokens);

using TokenCounter = std::function<std::size_t(const std::string&)>;

// Statement must hold exactly one of [MASK], <MASK>, <mask>; FormatError
// otherwise. nullopt when the answer is not a single token under `count`.
std::optional<Prompt> build_lama_cloze(const ClozeInstance& inst, const TokenCounter& count);

}  // namespace kilm::prompt

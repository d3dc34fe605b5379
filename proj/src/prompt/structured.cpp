#include "kilm/prompt/structured.hpp"

#include <algorithm>
#include <array>

#include "kilm/error.hpp"
#include "kilm/special_tokens.hpp"

namespace kilm::prompt {

namespace {

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::size_t find_marker(const infill::TrainingTarget& y, SpecialToken t) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.labels[i] == infill::SpanLabel::Marker && y.tokens[i].text == surface(t)) return i;
  }
  throw Error("target has no " + std::string(surface(t)) + " marker");
}

}  // namespace

ingest::DocumentSlice context_slice(const std::string& context, const MentionRef& mention, std::size_t window,
                                    ingest::MentionSpan& span_out) {
  std::size_t start = mention.start;
  std::size_t end = mention.end;
  if (start >= end || end > context.size() || context.compare(start, end - start, mention.text) != 0) {
    throw SpanError("mention '" + mention.text + "' not found at [" + std::to_string(start) + ", " +
                    std::to_string(end) + ") in context");
  }
  while (start < end && is_space(context[start])) ++start;
  while (end > start && is_space(context[end - 1])) --end;
  if (start == end) throw SpanError("empty mention");

  const std::array<std::size_t, 2> breaks{start, end};
  auto tt = tokenize(context, breaks);
  std::size_t ts = 0;
  while (ts < tt.offsets.size() && tt.offsets[ts].start < start) ++ts;
  std::size_t te = ts;
  while (te < tt.offsets.size() && tt.offsets[te].end <= end) ++te;
  if (ts == te || tt.offsets[ts].start != start || tt.offsets[te - 1].end != end) {
    throw SpanError("mention '" + mention.text + "' does not fall on token boundaries");
  }

  const std::size_t n = tt.tokens.size();
  std::size_t lo = ts;
  std::size_t hi = te;
  if (window > hi - lo) {
    const std::size_t extra = window - (hi - lo);
    lo = ts >= extra / 2 ? ts - extra / 2 : 0;
    hi = std::min(n, lo + window);
    lo = hi >= window ? std::min(lo, hi - window) : 0;
  }

  ingest::DocumentSlice slice;
  slice.tokens.assign(tt.tokens.begin() + static_cast<std::ptrdiff_t>(lo),
                      tt.tokens.begin() + static_cast<std::ptrdiff_t>(hi));
  if (!slice.tokens.empty()) slice.tokens.front().space_before = false;
  span_out = {ts - lo, te - lo, context.substr(start, end - start), std::string()};
  slice.mentions.push_back(span_out);
  return slice;
}

MaskedView masked_view(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                       const infill::Knowledge& knowledge, std::size_t max_len) {
  auto y = infill::kn_infill(slice, mention, knowledge, max_len);
  auto x = infill::kn_mask(y);
  const std::size_t open = find_marker(y, SpecialToken::DescOpen);
  auto block = y.knowledge_block();
  std::span<const Token> tokens(y.tokens);
  MaskedView v;
  v.encoder_text = render(x.tokens);
  v.decoder_prefix = render(tokens.subspan(0, open + 1));
  v.knowledge = render(tokens.subspan(block->first, block->second - block->first));
  return v;
}

Prompt build_ed_prompt(const EDInstance& inst, std::size_t candidate_index, std::size_t window) {
  if (candidate_index >= inst.candidates.size()) {
    throw std::out_of_range("candidate index " + std::to_string(candidate_index) + " out of range");
  }
  ingest::MentionSpan span;
  auto slice = context_slice(inst.context, inst.mention, window, span);
  const auto& c = inst.candidates[candidate_index];
  auto view = masked_view(slice, span, {c.title, c.description}, infill::kMaxLenWithKnowledge);

  Prompt p;
  p.instance_id = inst.id + "#" + std::to_string(candidate_index);
  p.group_id = inst.id;
  p.task = "ed";
  p.encoder_text = std::move(view.encoder_text);
  p.decoder_prefix = std::move(view.decoder_prefix);
  p.continuation = std::move(view.knowledge);
  p.candidate_index = candidate_index;
  p.candidate_title = c.title;
  if (inst.gold_title) {
    p.gold_title = inst.gold_title;
  } else if (inst.gold_index) {
    p.gold_title = inst.candidates.at(*inst.gold_index).title;
  }
  p.in_kb = inst.in_kb;
  return p;
}

std::vector<Prompt> build_ed_prompts(const EDInstance& inst, std::size_t window) {
  std::vector<Prompt> out;
  out.reserve(inst.candidates.size());
  for (std::size_t i = 0; i < inst.candidates.size(); ++i) out.push_back(build_ed_prompt(inst, i, window));
  return out;
}

Prompt build_appositive_prompt(const std::string& id, const std::string& context, const MentionRef& entity,
                               std::size_t window, std::size_t max_new_tokens) {
  ingest::MentionSpan span;
  auto slice = context_slice(context, entity, window, span);
  // The knowledge block is masked out, so its content never reaches the prompt.
  auto view = masked_view(slice, span, {"_", "_"}, infill::kMaxLenWithKnowledge);
  Prompt p;
  p.instance_id = id;
  p.group_id = id;
  p.task = "appositive";
  p.encoder_text = std::move(view.encoder_text);
  p.decoder_prefix = std::move(view.decoder_prefix);
  p.stop_token = std::string(surface(SpecialToken::DescClose));
  p.max_new_tokens = max_new_tokens;
  return p;
}

Prompt build_qa_prompt(const std::string& id, const std::string& question, const std::vector<QAExemplar>& exemplars,
                       std::size_t max_new_tokens) {
  std::string text;
  for (const auto& ex : exemplars) {
    if (ex.answers.empty()) throw FormatError("QA exemplar without an answer");
    text += "Question: " + collapse_whitespace(ex.question) + " Answer: " + collapse_whitespace(ex.answers.front());
    text += '\n';
  }
  text += "Question: " + collapse_whitespace(question) + " Answer:";
  Prompt p;
  p.instance_id = id;
  p.group_id = id;
  p.task = "qa";
  p.decoder_prefix = text;
  p.encoder_text = text + " " + std::string(surface(SpecialToken::Mask));
  p.stop_token = "\n";
  p.max_new_tokens = max_new_tokens;
  return p;
}

Prompt build_desc_probe(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                        const ingest::KnowledgeTable& table, std::size_t max_new_tokens) {
  const auto* entry = table.lookup(mention.entity);
  if (!entry) throw MissingKnowledgeError("no description for entity '" + mention.entity + "'");
  auto view = masked_view(slice, mention, {entry->entity, entry->description}, infill::kMaxLenWithKnowledge);
  Prompt p;
  p.instance_id = slice.doc_id + ":" + std::to_string(slice.slice_index) + ":" + std::to_string(mention.token_start);
  p.group_id = p.instance_id;
  p.task = "probe";
  p.encoder_text = std::move(view.encoder_text);
  p.decoder_prefix = std::move(view.decoder_prefix);
  p.stop_token = std::string(surface(SpecialToken::DescClose));
  p.max_new_tokens = max_new_tokens;
  p.gold_title = entry->entity;
  p.golds.push_back(std::move(view.knowledge));
  return p;
}

std::optional<Prompt> build_lama_cloze(const ClozeInstance& inst, const TokenCounter& count) {
  static constexpr std::array<std::string_view, 3> kForms{"[MASK]", "<MASK>", "<mask>"};
  std::size_t occurrences = 0;
  std::size_t pos = std::string::npos;
  std::size_t len = 0;
  for (auto form : kForms) {
    for (auto at = inst.statement.find(form); at != std::string::npos; at = inst.statement.find(form, at + 1)) {
      ++occurrences;
      pos = at;
      len = form.size();
    }
  }
  if (occurrences != 1) {
    throw FormatError("cloze statement " + inst.id + " has " + std::to_string(occurrences) +
                      " mask slots (expected 1)");
  }
  if (count(inst.answer) != 1) return std::nullopt;
  Prompt p;
  p.instance_id = inst.id;
  p.group_id = inst.id;
  p.task = "lama";
  p.encoder_text = inst.statement.substr(0, pos) + std::string(surface(SpecialToken::Mask)) +
                   inst.statement.substr(pos + len);
  p.decoder_prefix = std::string(rtrim(std::string_view(inst.statement).substr(0, pos)));
  p.stop_token = "\n";
  p.max_new_tokens = 1;
  p.golds.push_back(inst.answer);
  return p;
}

}  // namespace kilm::prompt

#include "kilm/infill/transforms.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

#include "kilm/error.hpp"

namespace kilm::infill {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Kilm: return "kilm";
    case Variant::KilmEnd: return "kilm_end";
    case Variant::Merge: return "merge";
    case Variant::Plain: return "plain";
  }
  return "plain";
}

Variant variant_from(std::string_view s) {
  if (s == "kilm") return Variant::Kilm;
  if (s == "kilm_end") return Variant::KilmEnd;
  if (s == "merge") return Variant::Merge;
  if (s == "plain") return Variant::Plain;
  throw ConfigError("unknown variant '" + std::string(s) + "' (expected kilm|kilm_end|merge|plain)");
}

std::optional<std::pair<std::size_t, std::size_t>> TrainingTarget::knowledge_block() const {
  std::size_t b = 0;
  while (b < labels.size() && labels[b] != SpanLabel::Knowledge) ++b;
  if (b == labels.size()) return std::nullopt;
  std::size_t e = b;
  while (e < labels.size() && labels[e] == SpanLabel::Knowledge) ++e;
  return std::make_pair(b, e);
}

Token special(SpecialToken t, bool space_before) { return {std::string(surface(t)), space_before}; }

std::vector<Token> knowledge_tokens(const Knowledge& k) {
  std::vector<Token> out = tokenize_tokens(k.title);
  out.push_back(special(SpecialToken::Sep));
  auto desc = tokenize_tokens(k.description);
  if (!desc.empty()) desc.front().space_before = true;
  out.insert(out.end(), desc.begin(), desc.end());
  out.front().space_before = true;
  return out;
}

namespace {

class TargetBuilder {
 public:
  void add(Token t, SpanLabel label) {
    y_.tokens.push_back(std::move(t));
    y_.labels.push_back(label);
  }

  void add_range(std::span<const Token> tokens, SpanLabel label, bool force_space) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      Token t = tokens[i];
      if (i == 0 && force_space) t.space_before = true;
      add(std::move(t), label);
    }
  }

  void mark_mention() { y_.mention_index = y_.tokens.size(); }
  std::size_t size() const { return y_.tokens.size(); }

  TrainingTarget finish() {
    if (!y_.tokens.empty()) y_.tokens.front().space_before = false;
    return std::move(y_);
  }

 private:
  TrainingTarget y_;
};

void check_mention(const ingest::DocumentSlice& slice, const ingest::MentionSpan& m) {
  if (m.token_end <= m.token_start || m.token_end > slice.tokens.size()) {
    throw SpanError("mention [" + std::to_string(m.token_start) + ", " + std::to_string(m.token_end) +
                    ") outside slice of " + std::to_string(slice.tokens.size()) + " tokens");
  }
}

Knowledge lookup_knowledge(const ingest::KnowledgeTable& table, const ingest::MentionSpan& m) {
  const auto* entry = table.lookup(m.entity);
  if (!entry) throw MissingKnowledgeError("no description for entity '" + m.entity + "'");
  return {entry->entity, entry->description};
}

// Drops `excess` tokens ending right before position `suffix_end`, provided
// they all lie in [suffix_begin, suffix_end).
void drop_suffix(TrainingTarget& y, std::size_t suffix_begin, std::size_t suffix_end, std::size_t excess) {
  if (excess > suffix_end - suffix_begin) {
    throw KnowledgeTooLongError("knowledge-bearing target of " + std::to_string(y.size()) +
                                " tokens cannot be cut to the length cap by dropping the suffix");
  }
  auto first = static_cast<std::ptrdiff_t>(suffix_end - excess);
  auto last = static_cast<std::ptrdiff_t>(suffix_end);
  y.tokens.erase(y.tokens.begin() + first, y.tokens.begin() + last);
  y.labels.erase(y.labels.begin() + first, y.labels.begin() + last);
}

}  // namespace

TrainingTarget kn_infill(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                         const Knowledge& knowledge, std::size_t max_len) {
  check_mention(slice, mention);
  std::span<const Token> tokens(slice.tokens);
  TargetBuilder b;
  b.add_range(tokens.subspan(0, mention.token_start), SpanLabel::Copy, false);
  b.add(special(SpecialToken::EntOpen), SpanLabel::Marker);
  b.mark_mention();
  b.add_range(tokens.subspan(mention.token_start, mention.token_end - mention.token_start),
              SpanLabel::Copy, true);
  b.add(special(SpecialToken::EntClose), SpanLabel::Marker);
  b.add(special(SpecialToken::DescOpen, false), SpanLabel::Marker);
  b.add_range(knowledge_tokens(knowledge), SpanLabel::Knowledge, true);
  b.add(special(SpecialToken::DescClose), SpanLabel::Marker);
  const std::size_t suffix_begin = b.size();
  b.add_range(tokens.subspan(mention.token_end), SpanLabel::Copy, false);
  TrainingTarget y = b.finish();
  if (y.size() > max_len) drop_suffix(y, suffix_begin, y.size(), y.size() - max_len);
  return y;
}

TrainingTarget kn_infill(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                         const ingest::KnowledgeTable& table, std::size_t max_len) {
  return kn_infill(slice, mention, lookup_knowledge(table, mention), max_len);
}

TrainingTarget kn_infill_end(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                             const Knowledge& knowledge, std::size_t max_len) {
  check_mention(slice, mention);
  std::span<const Token> tokens(slice.tokens);
  TargetBuilder b;
  b.add_range(tokens.subspan(0, mention.token_start), SpanLabel::Copy, false);
  b.add(special(SpecialToken::EntOpen), SpanLabel::Marker);
  b.mark_mention();
  b.add_range(tokens.subspan(mention.token_start, mention.token_end - mention.token_start),
              SpanLabel::Copy, true);
  b.add(special(SpecialToken::EntClose), SpanLabel::Marker);
  const std::size_t suffix_begin = b.size();
  b.add_range(tokens.subspan(mention.token_end), SpanLabel::Copy, false);
  const std::size_t suffix_end = b.size();
  b.add(special(SpecialToken::EosPair), SpanLabel::Marker);
  b.add(special(SpecialToken::DescOpen), SpanLabel::Marker);
  b.add_range(knowledge_tokens(knowledge), SpanLabel::Knowledge, true);
  b.add(special(SpecialToken::DescClose), SpanLabel::Marker);
  TrainingTarget y = b.finish();
  if (y.size() > max_len) drop_suffix(y, suffix_begin, suffix_end, y.size() - max_len);
  return y;
}

TrainingTarget kn_infill_end(const ingest::DocumentSlice& slice, const ingest::MentionSpan& mention,
                             const ingest::KnowledgeTable& table, std::size_t max_len) {
  return kn_infill_end(slice, mention, lookup_knowledge(table, mention), max_len);
}

TrainingTarget plain_target(std::vector<Token> tokens) {
  TrainingTarget y;
  y.labels.assign(tokens.size(), SpanLabel::Copy);
  y.tokens = std::move(tokens);
  if (!y.tokens.empty()) y.tokens.front().space_before = false;
  return y;
}

CorruptedInput kn_mask(const TrainingTarget& y) {
  CorruptedInput x;
  auto block = y.knowledge_block();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (block && i == block->first) {
      x.tokens.push_back(special(SpecialToken::Mask));
      x.slots.push_back({SlotKind::KnowledgeMask, block->first, block->second});
      i = block->second - 1;
      continue;
    }
    if (y.labels[i] == SpanLabel::Knowledge) {
      throw Error("target has more than one knowledge block");
    }
    x.tokens.push_back(y.tokens[i]);
    x.slots.push_back({y.labels[i] == SpanLabel::Copy ? SlotKind::Copy : SlotKind::Marker, i, i + 1});
  }
  x.knowledge_masked = block.has_value();
  return x;
}

std::size_t mask_budget(double mask_prob, std::size_t copy_tokens) {
  return static_cast<std::size_t>(std::floor(mask_prob * static_cast<double>(copy_tokens) + 1e-9));
}

CorruptedInput corrupt(const TrainingTarget& y, std::uint64_t seed_draw, double mask_prob, double lambda) {
  Rng rng(seed_draw);
  return text_mask(kn_mask(y), rng, mask_prob, lambda);
}

LossWeights compute_loss_weights(const TrainingTarget& y, const CorruptedInput& x) {
  std::uint64_t knowledge = 0;
  for (auto l : y.labels) knowledge += (l == SpanLabel::Knowledge);
  std::uint64_t covered = 0;
  for (const auto& s : x.infill_spans) covered += s.covered();
  const std::uint64_t n = y.size();
  return {{covered, n}, {knowledge, n}};
}

std::vector<Token> merge_transform(std::string_view entity, std::string_view description) {
  std::string_view e = trim(entity);
  std::string_view d = trim(description);
  if (e.empty() || d.empty()) throw std::invalid_argument("merge_transform: empty entity or description");
  std::string sentence;
  sentence.reserve(e.size() + d.size() + 5);
  sentence.append(e).append(" is ").append(d);
  if (d.back() != '.') sentence.push_back('.');
  return tokenize_tokens(sentence);
}

std::vector<Token> strip_to_copy(const TrainingTarget& y) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.labels[i] == SpanLabel::Copy) out.push_back(y.tokens[i]);
  }
  return out;
}

std::vector<XSlot> derive_slots(const TrainingTarget& y, const std::vector<Token>& x_tokens,
                                const std::vector<InfillSpan>& spans, bool knowledge_masked) {
  std::vector<XSlot> slots;
  slots.reserve(x_tokens.size());
  auto block = y.knowledge_block();
  if (knowledge_masked && !block) throw FormatError("knowledge_masked set but Y has no knowledge block");
  const std::string mask(surface(SpecialToken::Mask));
  std::size_t yi = 0;
  std::size_t si = 0;
  for (std::size_t xi = 0; xi < x_tokens.size(); ++xi) {
    if (si < spans.size() && spans[si].x_index == xi) {
      const auto& s = spans[si++];
      if (s.y_start != yi || s.y_end < s.y_start || s.y_end > y.size() || x_tokens[xi].text != mask) {
        throw FormatError("infill span at x=" + std::to_string(xi) + " inconsistent with Y");
      }
      for (std::size_t k = s.y_start; k < s.y_end; ++k) {
        if (y.labels[k] != SpanLabel::Copy) throw FormatError("infill span covers a non-Copy token");
      }
      slots.push_back({SlotKind::InfillMask, s.y_start, s.y_end});
      yi = s.y_end;
      continue;
    }
    if (knowledge_masked && yi == block->first) {
      if (x_tokens[xi].text != mask) throw FormatError("expected knowledge <mask> in X");
      slots.push_back({SlotKind::KnowledgeMask, block->first, block->second});
      yi = block->second;
      continue;
    }
    if (yi >= y.size() || x_tokens[xi].text != y.tokens[yi].text) {
      throw FormatError("X token " + std::to_string(xi) + " does not match Y");
    }
    if (y.labels[yi] == SpanLabel::Knowledge) throw FormatError("unmasked knowledge token in X");
    slots.push_back({y.labels[yi] == SpanLabel::Copy ? SlotKind::Copy : SlotKind::Marker, yi, yi + 1});
    ++yi;
  }
  if (yi != y.size() || si != spans.size()) throw FormatError("X does not cover Y");
  return slots;
}

}  // namespace kilm::infill

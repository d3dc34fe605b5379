#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kilm/tokenizer.hpp"

namespace kilm::infill {

enum class SpanLabel : char { Copy = 'C', Knowledge = 'K', Marker = 'M' };

enum class Variant { Kilm, KilmEnd, Merge, Plain };

std::string_view to_string(Variant v);
Variant variant_from(std::string_view s);

// Reconstruction target Y with one label per token.
struct TrainingTarget {
  std::vector<Token> tokens;
  std::vector<SpanLabel> labels;
  std::optional<std::size_t> mention_index;  // first surface token of the marked mention

  std::size_t size() const { return tokens.size(); }
  // [begin, end) of the Knowledge-labeled run, if any.
  std::optional<std::pair<std::size_t, std::size_t>> knowledge_block() const;

  friend bool operator==(const TrainingTarget&, const TrainingTarget&) = default;
};

enum class SlotKind : std::uint8_t { Copy, Marker, KnowledgeMask, InfillMask };

// Which Y tokens an X token stands for.
struct XSlot {
  SlotKind kind = SlotKind::Copy;
  std::size_t y_begin = 0;
  std::size_t y_end = 0;

  friend bool operator==(const XSlot&, const XSlot&) = default;
};

// Y tokens [y_start, y_end) replaced by the single MASK at X position x_index.
// y_start == y_end marks an inserted MASK.
struct InfillSpan {
  std::size_t y_start = 0;
  std::size_t y_end = 0;
  std::size_t x_index = 0;

  std::size_t covered() const { return y_end - y_start; }
  friend bool operator==(const InfillSpan&, const InfillSpan&) = default;
};

// Corrupted input X. `slots` is parallel to `tokens`.
struct CorruptedInput {
  std::vector<Token> tokens;
  std::vector<XSlot> slots;
  std::vector<InfillSpan> infill_spans;  // sorted by x_index
  bool knowledge_masked = false;

  friend bool operator==(const CorruptedInput& a, const CorruptedInput& b) {
    return a.tokens == b.tokens && a.infill_spans == b.infill_spans &&
           a.knowledge_masked == b.knowledge_masked;
  }
};

// Exact fraction; the denominator is |Y| and is never reduced.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// Loss mix (1 - alpha - beta) * L_copy + alpha * L_infill + beta * L_kn.
struct LossWeights {
  Ratio alpha;  // Y tokens covered by infill spans / |Y|
  Ratio beta;   // Knowledge tokens / |Y|

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct TrainingSample {
  std::string doc_id;
  std::size_t slice_index = 0;
  std::size_t epoch = 0;
  std::optional<std::string> entity;
  Variant variant = Variant::Plain;
  CorruptedInput x;
  TrainingTarget y;
  LossWeights weights;
  std::uint64_t seed_draw = 0;

  friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

}  // namespace kilm::infill

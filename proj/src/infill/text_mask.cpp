#include <algorithm>
#include <stdexcept>

#include "kilm/infill/transforms.hpp"

namespace kilm::infill {

namespace {

bool is_copy(const CorruptedInput& x, std::size_t i) { return x.slots[i].kind == SlotKind::Copy; }

void shift_spans_after(CorruptedInput& x, std::size_t x_index, std::ptrdiff_t delta) {
  for (auto& s : x.infill_spans) {
    if (s.x_index > x_index) s.x_index = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.x_index) + delta);
  }
}

void insert_span(CorruptedInput& x, InfillSpan span) {
  auto it = x.infill_spans.begin();
  while (it != x.infill_spans.end() && it->x_index < span.x_index) ++it;
  x.infill_spans.insert(it, span);
}

}  // namespace

CorruptedInput text_mask(CorruptedInput x, Rng& rng, double mask_prob, double lambda) {
  if (!(mask_prob >= 0.0 && mask_prob < 1.0)) throw std::invalid_argument("mask_prob must be in [0, 1)");
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson lambda must be > 0");
  if (x.slots.size() != x.tokens.size()) throw std::invalid_argument("text_mask: X has no slot map");

  std::size_t copy_count = 0;
  for (std::size_t i = 0; i < x.slots.size(); ++i) copy_count += is_copy(x, i);
  const std::size_t budget = mask_budget(mask_prob, copy_count);
  const Token mask = special(SpecialToken::Mask);

  std::size_t covered = 0;
  std::vector<std::size_t> starts;
  while (covered < budget) {
    auto len = static_cast<std::size_t>(poisson(rng, lambda));
    len = std::min(len, budget - covered);

    if (len == 0) {
      starts.clear();
      for (std::size_t i = 0; i < x.slots.size(); ++i) {
        if (is_copy(x, i)) starts.push_back(i);
      }
      if (starts.empty()) break;
      const std::size_t at = starts[uniform_below(rng, starts.size())];
      const std::size_t y_at = x.slots[at].y_begin;
      for (auto& s : x.infill_spans) s.x_index += (s.x_index >= at ? 1 : 0);
      x.tokens.insert(x.tokens.begin() + static_cast<std::ptrdiff_t>(at), mask);
      x.slots.insert(x.slots.begin() + static_cast<std::ptrdiff_t>(at), {SlotKind::InfillMask, y_at, y_at});
      insert_span(x, {y_at, y_at, at});
      continue;
    }

    std::size_t longest = 0;
    for (std::size_t i = 0, run = 0; i < x.slots.size(); ++i) {
      run = is_copy(x, i) ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    if (longest == 0) break;
    len = std::min(len, longest);

    starts.clear();
    for (std::size_t i = 0, run = 0; i < x.slots.size(); ++i) {
      run = is_copy(x, i) ? run + 1 : 0;
      if (run >= len) starts.push_back(i + 1 - len);
    }
    const std::size_t at = starts[uniform_below(rng, starts.size())];
    const std::size_t y_begin = x.slots[at].y_begin;
    const std::size_t y_end = x.slots[at + len - 1].y_end;
    auto first = x.tokens.begin() + static_cast<std::ptrdiff_t>(at);
    x.tokens.erase(first, first + static_cast<std::ptrdiff_t>(len));
    x.tokens.insert(x.tokens.begin() + static_cast<std::ptrdiff_t>(at), mask);
    auto sfirst = x.slots.begin() + static_cast<std::ptrdiff_t>(at);
    x.slots.erase(sfirst, sfirst + static_cast<std::ptrdiff_t>(len));
    x.slots.insert(x.slots.begin() + static_cast<std::ptrdiff_t>(at), {SlotKind::InfillMask, y_begin, y_end});
    shift_spans_after(x, at, -static_cast<std::ptrdiff_t>(len - 1));
    insert_span(x, {y_begin, y_end, at});
    covered += len;
  }
  if (!x.tokens.empty()) x.tokens.front().space_before = false;
  return x;
}

}  // namespace kilm::infill

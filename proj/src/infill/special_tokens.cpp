#include "kilm/special_tokens.hpp"

namespace kilm {

std::optional<SpecialToken> special_token_from(std::string_view text) {
  for (auto t : kAllSpecialTokens) {
    if (surface(t) == text) return t;
  }
  return std::nullopt;
}

bool is_special_token(std::string_view text) { return special_token_from(text).has_value(); }

bool contains_special_surface(std::string_view text) {
  for (auto t : kAllSpecialTokens) {
    if (text.find(surface(t)) != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace kilm

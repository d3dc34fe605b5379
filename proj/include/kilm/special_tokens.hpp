#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace kilm {

enum class SpecialToken { EntOpen, EntClose, DescOpen, DescClose, Sep, Mask, EosPair };

inline constexpr std::array<SpecialToken, 7> kAllSpecialTokens = {
    SpecialToken::EntOpen, SpecialToken::EntClose, SpecialToken::DescOpen, SpecialToken::DescClose,
    SpecialToken::Sep,     SpecialToken::Mask,     SpecialToken::EosPair};

constexpr std::string_view surface(SpecialToken t) {
  switch (t) {
    case SpecialToken::EntOpen: return "<ent>";
    case SpecialToken::EntClose: return "</ent>";
    case SpecialToken::DescOpen: return "<ent_desc>";
    case SpecialToken::DescClose: return "</ent_desc>";
    case SpecialToken::Sep: return "<sep>";
    case SpecialToken::Mask: return "<mask>";
    case SpecialToken::EosPair: return "</s></s>";
  }
  return "";
}

std::optional<SpecialToken> special_token_from(std::string_view text);
bool is_special_token(std::string_view text);

// True if any special-token surface occurs as a substring of `text`.
bool contains_special_surface(std::string_view text);

}  // namespace kilm

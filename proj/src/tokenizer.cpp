#include "kilm/tokenizer.hpp"

#include <algorithm>

#include "kilm/error.hpp"

namespace kilm {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

TokenizedText tokenize(std::string_view text, std::span<const std::size_t> breaks) {
  TokenizedText out;
  std::size_t i = 0;
  std::size_t bi = 0;
  bool saw_space = false;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      saw_space = true;
      ++i;
      continue;
    }
    if (is_ascii_punct(c)) {
      out.tokens.push_back({std::string(1, c), saw_space});
      out.offsets.push_back({i, i + 1});
      saw_space = false;
      ++i;
      continue;
    }
    while (bi < breaks.size() && breaks[bi] <= i) ++bi;
    std::size_t limit = bi < breaks.size() ? breaks[bi] : n;
    std::size_t j = i;
    while (j < limit && !is_space(text[j]) && !is_ascii_punct(text[j])) ++j;
    out.tokens.push_back({std::string(text.substr(i, j - i)), saw_space});
    out.offsets.push_back({i, j});
    saw_space = false;
    i = j;
  }
  return out;
}

std::vector<Token> tokenize_tokens(std::string_view text) {
  return tokenize(text).tokens;
}

std::string render(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && tokens[i].space_before) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

std::vector<Token> align_tokens(std::string_view rendered, std::span<const std::string> texts) {
  std::vector<Token> out;
  out.reserve(texts.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    bool space = false;
    if (i > 0 && pos < rendered.size() && rendered[pos] == ' ') {
      space = true;
      ++pos;
    }
    if (rendered.compare(pos, texts[i].size(), texts[i]) != 0) {
      throw FormatError("token '" + texts[i] + "' does not match rendered text at offset " +
                        std::to_string(pos));
    }
    pos += texts[i].size();
    out.push_back({texts[i], space});
  }
  if (pos != rendered.size()) {
    throw FormatError("rendered text has " + std::to_string(rendered.size() - pos) +
                      " trailing bytes not covered by tokens");
  }
  return out;
}

std::vector<std::string> token_texts(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending = true;
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

}  // namespace kilm

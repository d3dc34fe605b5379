#pragma once

#include <cstddef>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace kilm {

// A pipeline token. `space_before` records whether a single space separates
// it from the previous token when the sequence is rendered back to text; it
// is ignored for the first token of a sequence.
struct Token {
  std::string text;
  bool space_before = false;

  friend bool operator==(const Token&, const Token&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Token& t) {
    return os << (t.space_before ? "_" : "") << t.text;
  }
};

struct ByteRange {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct TokenizedText {
  std::vector<Token> tokens;
  std::vector<ByteRange> offsets;  // parallel to tokens
};

bool is_space(char c);
bool is_ascii_punct(char c);

// Whitespace-delimited words with every ASCII punctuation character split off
// as its own token. Bytes >= 0x80 are word characters. `breaks` lists extra
// byte offsets at which a token must end (used to keep link boundaries on
// token boundaries); it must be sorted.
TokenizedText tokenize(std::string_view text, std::span<const std::size_t> breaks = {});

std::vector<Token> tokenize_tokens(std::string_view text);

// Joins tokens, inserting one space before each non-first token that has
// space_before set.
std::string render(std::span<const Token> tokens);

// Inverse of render for a known token sequence: sets space_before by aligning
// `texts` against `rendered`. Throws FormatError on mismatch.
std::vector<Token> align_tokens(std::string_view rendered, std::span<const std::string> texts);

std::vector<std::string> token_texts(std::span<const Token> tokens);

std::vector<std::string> split_whitespace(std::string_view text);
std::size_t count_words(std::string_view text);

std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string to_lower_ascii(std::string_view s);

}  // namespace kilm

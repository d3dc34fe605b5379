#include <algorithm>
#include <array>

#include "kilm/error.hpp"
#include "kilm/ingest/article.hpp"
#include "kilm/special_tokens.hpp"
#include "kilm/tokenizer.hpp"

namespace kilm::ingest {
namespace {

constexpr std::array<std::string_view, 48> kAbbreviations = {
    "inc", "ltd", "co",   "corp", "mr",   "mrs",  "ms",     "dr",   "st",  "jr",  "sr",   "bros",
    "vs",  "etc", "no",   "mt",   "ft",   "prof", "gen",    "col",  "lt",  "sgt", "capt", "rev",
    "jan", "feb", "mar",  "apr",  "jun",  "jul",  "aug",    "sep",  "sept", "oct", "nov", "dec",
    "u.s", "e.g", "i.e",  "approx", "est", "ca",  "c",      "b",    "d",   "vol", "pp",   "op"};

bool is_abbreviation(std::string_view word) {
  std::string w = to_lower_ascii(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end();
}

bool is_closing_quote(std::string_view s, std::size_t i, std::size_t& width) {
  if (s[i] == '"' || s[i] == '\'') {
    width = 1;
    return true;
  }
  for (std::string_view q : {"”", "’", "»"}) {
    if (s.compare(i, q.size(), q) == 0) {
      width = q.size();
      return true;
    }
  }
  return false;
}

// The word ending right before position `dot` (letters and inner dots).
std::string_view word_before(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(s[b - 1]) && s[b - 1] != '(' && s[b - 1] != '"') --b;
  return s.substr(b, dot - b);
}

bool is_boundary_period(std::string_view s, std::size_t dot) {
  std::string_view w = word_before(s, dot);
  if (w.empty()) return true;
  if (is_abbreviation(w)) return false;
  if (w.size() == 1 && w[0] >= 'A' && w[0] <= 'Z') return false;
  std::size_t j = dot + 1;
  while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
  if (j < s.size() && s[j] >= 'a' && s[j] <= 'z') return false;
  return true;
}

std::optional<std::size_t> find_template_close(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i + 1 < s.size();) {
    if (s.compare(i, 2, "{{") == 0) {
      ++depth;
      i += 2;
    } else if (s.compare(i, 2, "}}") == 0) {
      if (--depth == 0) return i;
      i += 2;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

std::string_view first_argument(std::string_view args) {
  int braces = 0;
  int brackets = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args.compare(i, 2, "{{") == 0) ++braces, ++i;
    else if (args.compare(i, 2, "}}") == 0) --braces, ++i;
    else if (args.compare(i, 2, "[[") == 0) ++brackets, ++i;
    else if (args.compare(i, 2, "]]") == 0) --brackets, ++i;
    else if (args[i] == '|' && braces == 0 && brackets == 0) return args.substr(0, i);
  }
  return args;
}

}  // namespace

std::string_view to_string(DescriptionSource source) {
  return source == DescriptionSource::Template ? "template" : "first_sentence";
}

DescriptionSource description_source_from(std::string_view s) {
  if (s == "template") return DescriptionSource::Template;
  if (s == "first_sentence") return DescriptionSource::FirstSentence;
  throw FormatError("unknown description source '" + std::string(s) + "'");
}

std::optional<std::string> find_short_description_template(std::string_view wikitext) {
  std::size_t pos = 0;
  while ((pos = wikitext.find("{{", pos)) != std::string_view::npos) {
    std::size_t p = pos + 2;
    while (p < wikitext.size() && is_space(wikitext[p])) ++p;
    std::string name;
    std::size_t q = p;
    while (q < wikitext.size() && wikitext[q] != '|' && wikitext[q] != '}' && wikitext[q] != '\n') ++q;
    name = canonical_title(to_lower_ascii(wikitext.substr(p, q - p)));
    if ((name == "Short description") && q < wikitext.size() && wikitext[q] == '|') {
      auto close = find_template_close(wikitext, pos);
      if (!close) return std::nullopt;
      std::string_view arg = first_argument(wikitext.substr(q + 1, *close - q - 1));
      std::string text = collapse_whitespace(extract_links(arg).clean_text);
      if (text.empty() || to_lower_ascii(text) == "none") return std::nullopt;
      return text;
    }
    pos += 2;
  }
  return std::nullopt;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  int depth = 0;
  auto emit = [&](std::size_t end) {
    std::string s = collapse_whitespace(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      depth = std::max(0, depth - 1);
    } else if (c == '\n') {
      emit(i);
      depth = 0;
    } else if ((c == '.' || c == '!' || c == '?') && depth == 0) {
      std::size_t end = i + 1;
      std::size_t width = 0;
      while (end < text.size() && is_closing_quote(text, end, width)) end += width;
      bool at_gap = end >= text.size() || is_space(text[end]);
      if (at_gap && (c != '.' || is_boundary_period(text, i))) {
        emit(end);
        i = end - 1;
      }
    }
  }
  emit(text.size());
  return out;
}

std::optional<ShortDescription> extract_short_description(const RawPage& page,
                                                          std::string_view clean_text) {
  if (auto t = find_short_description_template(page.wikitext)) {
    return ShortDescription{std::move(*t), DescriptionSource::Template};
  }
  auto sentences = split_sentences(clean_text);
  for (std::size_t i = 0; i < sentences.size() && i < 2; ++i) {
    if (count_words(sentences[i]) >= 3) {
      return ShortDescription{std::move(sentences[i]), DescriptionSource::FirstSentence};
    }
  }
  return std::nullopt;
}

ArticleParse parse_article(const RawPage& page) {
  CleanText clean = extract_links(page.wikitext);
  if (contains_special_surface(clean.clean_text)) {
    throw Error("special token surface survived cleaning in page '" + page.title + "'");
  }
  ArticleParse result;
  result.warnings = clean.warnings;
  auto& a = result.article;
  a.page_id = page.page_id;
  a.title = canonical_title(page.title);
  a.short_description = extract_short_description(page, clean.clean_text);
  a.clean_text = std::move(clean.clean_text);
  a.links = std::move(clean.links);
  a.summary_end = clean.summary_end;
  return result;
}

}  // namespace kilm::ingest

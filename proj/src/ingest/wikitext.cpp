#include "kilm/ingest/wikitext.hpp"

#include <array>
#include <charconv>
#include <optional>

#include "kilm/tokenizer.hpp"

namespace kilm::ingest {
namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char a = s[pos + i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != prefix[i]) return false;
  }
  return true;
}

// Tags whose content is dropped together with the tag.
constexpr std::array<std::string_view, 16> kDropContentTags = {
    "ref",    "references", "gallery", "math",      "timeline", "score",
    "syntaxhighlight", "source", "imagemap", "chem", "ce", "graph",
    "mapframe", "templatedata", "hiero", "categorytree"};

bool is_drop_content_tag(std::string_view name) {
  for (auto t : kDropContentTags) {
    if (t == name) return true;
  }
  return false;
}

std::string remove_comments(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto open = s.find("<!--", i);
    if (open == std::string_view::npos) {
      out.append(s.substr(i));
      break;
    }
    out.append(s.substr(i, open - i));
    auto close = s.find("-->", open + 4);
    if (close == std::string_view::npos) break;
    i = close + 3;
  }
  return out;
}

std::string remove_drop_content_tags(std::string_view s, std::size_t& warnings) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && is_alpha(s[j])) ++j;
    std::string name = to_lower_ascii(s.substr(i + 1, j - i - 1));
    bool boundary = j < s.size() && (s[j] == '>' || s[j] == '/' || is_space(s[j]));
    if (name.empty() || !boundary || !is_drop_content_tag(name)) {
      out.push_back(s[i++]);
      continue;
    }
    auto gt = s.find('>', j);
    if (gt == std::string_view::npos) {
      ++warnings;
      out.push_back(s[i++]);
      continue;
    }
    if (s[gt - 1] == '/') {
      i = gt + 1;
      continue;
    }
    // Find the matching close tag, case-insensitively.
    std::size_t k = gt + 1;
    std::optional<std::size_t> close_end;
    while ((k = s.find("</", k)) != std::string_view::npos) {
      if (starts_with_ci(s, k + 2, name)) {
        std::size_t m = k + 2 + name.size();
        while (m < s.size() && is_space(s[m])) ++m;
        if (m < s.size() && s[m] == '>') {
          close_end = m + 1;
          break;
        }
      }
      k += 2;
    }
    if (!close_end) {
      ++warnings;
      i = gt + 1;
      continue;
    }
    i = *close_end;
  }
  return out;
}

// Removes balanced {{...}} (and {{{...}}}) regions. Unclosed regions are kept
// verbatim and counted.
std::string remove_templates(std::string_view s, std::size_t& warnings) {
  std::string out;
  out.reserve(s.size());
  std::vector<int> stack;
  std::size_t region_start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "{{") == 0) {
      if (stack.empty()) region_start = i;
      if (s.compare(i, 3, "{{{") == 0) {
        stack.push_back(3);
        i += 3;
      } else {
        stack.push_back(2);
        i += 2;
      }
      continue;
    }
    if (!stack.empty() && s.compare(i, 2, "}}") == 0) {
      int width = stack.back();
      if (width == 3 && s.compare(i, 3, "}}}") == 0) {
        i += 3;
      } else {
        i += 2;
      }
      stack.pop_back();
      continue;
    }
    if (stack.empty()) out.push_back(s[i]);
    ++i;
  }
  if (!stack.empty()) {
    ++warnings;
    out.append(s.substr(region_start));
  }
  return out;
}

bool at_line_start(std::string_view s, std::size_t i) {
  while (i > 0 && (s[i - 1] == ' ' || s[i - 1] == '\t')) --i;
  return i == 0 || s[i - 1] == '\n';
}

std::string remove_tables(std::string_view s, std::size_t& warnings) {
  std::string out;
  out.reserve(s.size());
  int depth = 0;
  std::size_t region_start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "{|") == 0 && at_line_start(s, i)) {
      if (depth == 0) region_start = i;
      ++depth;
      i += 2;
      continue;
    }
    if (depth > 0 && s.compare(i, 2, "|}") == 0 && at_line_start(s, i)) {
      --depth;
      i += 2;
      continue;
    }
    if (depth == 0) out.push_back(s[i]);
    ++i;
  }
  if (depth > 0) {
    ++warnings;
    out.append(s.substr(region_start));
  }
  return out;
}

// Namespace prefixes whose links never render inline text.
bool is_hidden_namespace(std::string_view prefix_lower) {
  return prefix_lower == "file" || prefix_lower == "image" || prefix_lower == "category" ||
         prefix_lower == "media";
}

bool is_interlanguage_prefix(std::string_view prefix) {
  if (prefix.size() < 2 || prefix.size() > 12) return false;
  if (!(prefix[0] >= 'a' && prefix[0] <= 'z')) return false;
  std::size_t letters = 0;
  while (letters < prefix.size() && prefix[letters] >= 'a' && prefix[letters] <= 'z') ++letters;
  if (letters < 2 || letters > 3) return false;
  for (std::size_t i = letters; i < prefix.size(); ++i) {
    char c = prefix[i];
    if (!(c == '-' || (c >= 'a' && c <= 'z'))) return false;
  }
  return true;
}

// Finds the "]]" closing a "[[" at `open`, honoring nesting. Gives up at a
// blank line.
std::optional<std::size_t> find_link_close(std::string_view s, std::size_t open) {
  int depth = 0;
  std::size_t i = open;
  while (i + 1 < s.size()) {
    if (s[i] == '\n' && s[i + 1] == '\n') return std::nullopt;
    if (s[i] == '[' && s[i + 1] == '[') {
      ++depth;
      i += 2;
      continue;
    }
    if (s[i] == ']' && s[i + 1] == ']') {
      if (--depth == 0) return i;
      i += 2;
      continue;
    }
    ++i;
  }
  return std::nullopt;
}

std::string remove_hidden_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "[[") == 0) {
      std::size_t p = i + 2;
      while (p < s.size() && (s[p] == ' ' || s[p] == '\t')) ++p;
      auto colon = s.find(':', p);
      auto bar = s.find_first_of("|]\n", p);
      if (colon != std::string_view::npos && (bar == std::string_view::npos || colon < bar)) {
        std::string_view prefix = trim(s.substr(p, colon - p));
        if (is_hidden_namespace(to_lower_ascii(prefix)) || is_interlanguage_prefix(prefix)) {
          if (auto close = find_link_close(s, i)) {
            i = *close + 2;
            continue;
          }
        }
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

struct NamedEntity {
  std::string_view name;
  char32_t code_point;
};

constexpr std::array<NamedEntity, 24> kNamedEntities = {{
    {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},      {"quot", U'"'},
    {"apos", U'\''},   {"nbsp", U' '},     {"ndash", U'–'}, {"mdash", U'—'},
    {"minus", U'−'}, {"times", U'×'}, {"hellip", U'…'}, {"lsquo", U'‘'},
    {"rsquo", U'’'}, {"ldquo", U'“'}, {"rdquo", U'”'}, {"thinsp", U' '},
    {"ensp", U' '},    {"emsp", U' '},     {"deg", U'°'}, {"middot", U'·'},
    {"eacute", U'é'}, {"copy", U'©'}, {"prime", U'′'}, {"shy", U'\0'},
}};

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view body = s.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (!body.empty() && body[0] == '#') {
      std::uint32_t v = 0;
      std::string_view digits = body.substr(1);
      int base = 10;
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        digits.remove_prefix(1);
        base = 16;
      }
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
      if (ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty() && v > 0 &&
          v <= 0x10ffff) {
        cp = static_cast<char32_t>(v);
      }
    } else {
      for (const auto& e : kNamedEntities) {
        if (e.name == body) cp = e.code_point;
      }
    }
    if (!cp) {
      out.push_back(s[i++]);
      continue;
    }
    if (*cp != U'\0') append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

// Removes HTML-like tags (<b>, </span>, <br/>), keeping their content. This
// also removes anything shaped like a special token.
std::string strip_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<') {
      std::size_t j = i + 1;
      if (j < s.size() && s[j] == '/') ++j;
      if (j < s.size() && is_alpha(s[j])) {
        std::size_t k = j;
        while (k < s.size() && s[k] != '>' && s[k] != '<' && s[k] != '\n') ++k;
        if (k < s.size() && s[k] == '>') {
          std::string name = to_lower_ascii(s.substr(j, std::min<std::size_t>(2, k - j)));
          if (name == "br") out.push_back(' ');
          i = k + 1;
          continue;
        }
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string remove_behavior_switches(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "__") == 0) {
      std::size_t j = i + 2;
      while (j < s.size() && s[j] >= 'A' && s[j] <= 'Z') ++j;
      if (j > i + 2 && s.compare(j, 2, "__") == 0) {
        i = j + 2;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

// Output builder that collapses whitespace: runs containing a newline become
// one '\n', other runs one ' ', and leading/trailing whitespace is dropped.
class Emitter {
 public:
  void put(char c) {
    if (is_space(c)) {
      if (c == '\n') pending_newline_ = true;
      else pending_space_ = true;
      return;
    }
    if (!out_.empty()) {
      if (pending_newline_) out_.push_back('\n');
      else if (pending_space_) out_.push_back(' ');
    }
    pending_newline_ = pending_space_ = false;
    out_.push_back(c);
  }

  void newline() { pending_newline_ = true; }

  std::size_t size() const { return out_.size(); }
  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  bool pending_space_ = false;
  bool pending_newline_ = false;
};

class Renderer {
 public:
  explicit Renderer(std::string_view s) : s_(s) {}

  CleanText run() {
    std::optional<std::size_t> summary_end;
    std::size_t i = 0;
    while (i < s_.size()) {
      std::size_t eol = s_.find('\n', i);
      if (eol == std::string_view::npos) eol = s_.size();
      std::string_view line = s_.substr(i, eol - i);
      if (is_heading(line)) {
        if (!summary_end) summary_end = out_.size();
      } else {
        render_line(line);
      }
      out_.newline();
      i = eol + 1;
    }
    CleanText result;
    result.summary_end = summary_end.value_or(out_.size());
    result.clean_text = out_.take();
    if (result.summary_end > result.clean_text.size()) result.summary_end = result.clean_text.size();
    result.links = std::move(links_);
    result.warnings = warnings_;
    return result;
  }

 private:
  static bool is_heading(std::string_view line) {
    std::string_view t = trim(line);
    return t.size() >= 3 && t.front() == '=' && t.back() == '=';
  }

  void render_line(std::string_view line) {
    std::string_view t = trim(line);
    if (t.starts_with("----")) return;
    if (!t.empty() && (t[0] == '|' || t[0] == '!')) return;
    std::size_t p = 0;
    while (p < line.size() && (line[p] == '*' || line[p] == '#' || line[p] == ':' || line[p] == ';')) ++p;
    render_inline(line.substr(p), true);
  }

  // Renders inline markup. Links are recorded only when `record` is set, so
  // nested links inside a label contribute text but no extra span.
  void render_inline(std::string_view s, bool record) {
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (c == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
        while (i < s.size() && s[i] == '\'') ++i;
        continue;
      }
      if (c == '[' && i + 1 < s.size() && s[i + 1] == '[') {
        i = render_internal_link(s, i, record);
        continue;
      }
      if (c == '[' && is_external_link_start(s.substr(i + 1))) {
        i = render_external_link(s, i);
        continue;
      }
      out_.put(c);
      ++i;
    }
  }

  static bool is_external_link_start(std::string_view s) {
    for (std::string_view scheme : {"http://", "https://", "//", "ftp://", "mailto:"}) {
      if (starts_with_ci(s, 0, scheme)) return true;
    }
    return false;
  }

  std::size_t render_external_link(std::string_view s, std::size_t open) {
    auto close = s.find(']', open);
    auto eol = s.find('\n', open);
    if (close == std::string_view::npos || (eol != std::string_view::npos && eol < close)) {
      out_.put(s[open]);
      return open + 1;
    }
    std::string_view inner = s.substr(open + 1, close - open - 1);
    auto space = inner.find(' ');
    if (space != std::string_view::npos) render_inline(inner.substr(space + 1), false);
    return close + 1;
  }

  std::size_t render_internal_link(std::string_view s, std::size_t open, bool record) {
    auto close = find_link_close(s, open);
    if (!close) {
      ++warnings_;
      out_.put('[');
      out_.put('[');
      return open + 2;
    }
    std::string_view inner = s.substr(open + 2, *close - open - 2);
    std::string_view target = inner;
    std::optional<std::string_view> label;
    if (auto bar = inner.find('|'); bar != std::string_view::npos) {
      target = inner.substr(0, bar);
      label = inner.substr(bar + 1);
    }
    std::string_view raw_target = trim(target);
    bool leading_colon = !raw_target.empty() && raw_target[0] == ':';
    if (leading_colon) raw_target = trim(raw_target.substr(1));

    std::string entity;
    if (auto colon = raw_target.find(':'); colon != std::string_view::npos) {
      std::string_view prefix = trim(raw_target.substr(0, colon));
      bool hidden = is_hidden_namespace(to_lower_ascii(prefix));
      if ((hidden || is_interlanguage_prefix(prefix)) && !leading_colon) return *close + 2;
      if (!hidden) entity = canonical_title(strip_fragment(raw_target));
    } else {
      entity = canonical_title(strip_fragment(raw_target));
    }

    std::string label_text;
    if (!label) {
      label_text = std::string(raw_target);
    } else if (trim(*label).empty()) {
      label_text = pipe_trick(raw_target);
    } else {
      label_text = std::string(*label);
    }

    const std::size_t before = out_.size();
    render_inline(label_text, false);
    std::size_t start = before;
    if (start < out_.size() && is_space(out_.str()[start])) ++start;
    const std::size_t end = out_.size();
    if (record && !entity.empty() && end > start) {
      links_.push_back({start, end, out_.str().substr(start, end - start), std::move(entity)});
    }
    return *close + 2;
  }

  static std::string_view strip_fragment(std::string_view t) {
    auto hash = t.find('#');
    return hash == std::string_view::npos ? t : trim(t.substr(0, hash));
  }

  static std::string pipe_trick(std::string_view target) {
    std::string_view t = target;
    if (auto colon = t.find(':'); colon != std::string_view::npos) t = t.substr(colon + 1);
    if (auto paren = t.find(" ("); paren != std::string_view::npos) t = t.substr(0, paren);
    return std::string(trim(t));
  }

  std::string_view s_;
  Emitter out_;
  std::vector<LinkSpan> links_;
  std::size_t warnings_ = 0;
};

}  // namespace

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

std::string strip_blocks(std::string_view wikitext, std::size_t& warnings) {
  std::string s = remove_comments(wikitext);
  s = remove_drop_content_tags(s, warnings);
  s = remove_templates(s, warnings);
  s = remove_tables(s, warnings);
  s = remove_hidden_links(s);
  s = remove_behavior_switches(s);
  s = decode_entities(s);
  return strip_tags(s);
}

CleanText extract_links(std::string_view wikitext) {
  std::size_t warnings = 0;
  std::string stripped = strip_blocks(wikitext, warnings);
  CleanText result = Renderer(stripped).run();
  result.warnings += warnings;
  return result;
}

std::string canonical_title(std::string_view title) {
  std::string s(title);
  for (char& c : s) {
    if (c == '_') c = ' ';
  }
  std::string out = collapse_whitespace(s);
  if (!out.empty() && out[0] == ':') out = collapse_whitespace(std::string_view(out).substr(1));
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

}  // namespace kilm::ingest

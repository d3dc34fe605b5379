#include "kilm/ingest/dump_reader.hpp"

#include <expat.h>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <charconv>
#include <deque>
#include <fstream>

#include "kilm/error.hpp"
#include "kilm/tokenizer.hpp"

namespace kilm::ingest {
namespace io = boost::iostreams;

namespace {

constexpr std::size_t kChunkSize = 1 << 16;

enum class Field { None, Title, Ns, Id, Text };

const char* find_attr(const XML_Char** attrs, std::string_view key) {
  for (; attrs && attrs[0]; attrs += 2) {
    if (key == attrs[0]) return attrs[1];
  }
  return nullptr;
}

}  // namespace

Compression detect_compression(std::string_view magic) {
  if (magic.size() >= 3 && magic.substr(0, 3) == "BZh") return Compression::Bzip2;
  if (magic.size() >= 2 && static_cast<unsigned char>(magic[0]) == 0x1f &&
      static_cast<unsigned char>(magic[1]) == 0x8b) {
    return Compression::Gzip;
  }
  return Compression::None;
}

std::optional<std::string> parse_redirect_markup(std::string_view wikitext) {
  std::string_view s = trim(wikitext);
  constexpr std::string_view kKeyword = "#redirect";
  if (s.size() < kKeyword.size() || to_lower_ascii(s.substr(0, kKeyword.size())) != kKeyword) {
    return std::nullopt;
  }
  s.remove_prefix(kKeyword.size());
  std::size_t open = 0;
  while (open < s.size() && (s[open] == ' ' || s[open] == '\t' || s[open] == ':')) ++open;
  if (s.substr(open, 2) != "[[") return std::nullopt;
  auto close = s.find("]]", open);
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view target = s.substr(open + 2, close - open - 2);
  if (auto bar = target.find('|'); bar != std::string_view::npos) target = target.substr(0, bar);
  target = trim(target);
  if (target.empty()) return std::nullopt;
  return std::string(target);
}

struct DumpReader::Impl {
  std::unique_ptr<std::ifstream> owned;
  io::filtering_istream stream;
  Compression compression = Compression::None;
  XML_Parser parser = nullptr;

  std::deque<RawPage> ready;
  std::optional<DumpError> error;
  bool finished = false;
  std::size_t skipped = 0;

  std::vector<std::string> path;
  bool in_page = false;
  bool have_page_id = false;
  bool have_redirect_element = false;
  Field field = Field::None;
  std::string buf;
  RawPage current;

  explicit Impl(std::istream& in) {
    compression = sniff(in);
    if (compression == Compression::Bzip2) stream.push(io::bzip2_decompressor());
    if (compression == Compression::Gzip) stream.push(io::gzip_decompressor());
    stream.push(in);

    parser = XML_ParserCreate("UTF-8");
    if (!parser) throw Error("cannot create XML parser");
    XML_SetUserData(parser, this);
    XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    XML_SetCharacterDataHandler(parser, &Impl::on_chars);
  }

  ~Impl() {
    if (parser) XML_ParserFree(parser);
  }

  static Compression sniff(std::istream& in) {
    auto start = in.tellg();
    if (start != std::streampos(-1)) {
      char magic[3] = {};
      in.read(magic, 3);
      std::size_t got = static_cast<std::size_t>(in.gcount());
      in.clear();
      in.seekg(start);
      return detect_compression(std::string_view(magic, got));
    }
    int c = in.peek();
    if (c == 'B') return Compression::Bzip2;
    if (c == 0x1f) return Compression::Gzip;
    return Compression::None;
  }

  static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    static_cast<Impl*>(self)->start(name, attrs);
  }
  static void XMLCALL on_end(void* self, const XML_Char* name) { static_cast<Impl*>(self)->end(name); }
  static void XMLCALL on_chars(void* self, const XML_Char* s, int len) {
    auto* impl = static_cast<Impl*>(self);
    if (impl->field != Field::None) impl->buf.append(s, static_cast<std::size_t>(len));
  }

  void start(std::string_view name, const XML_Char** attrs) {
    path.emplace_back(name);
    const std::size_t depth = path.size();
    if (depth == 2 && name == "page") {
      in_page = true;
      have_page_id = false;
      have_redirect_element = false;
      current = RawPage{};
      return;
    }
    if (!in_page) return;
    if (depth == 3) {
      if (name == "title") begin_field(Field::Title);
      else if (name == "ns") begin_field(Field::Ns);
      else if (name == "id" && !have_page_id) begin_field(Field::Id);
      else if (name == "redirect") {
        have_redirect_element = true;
        if (const char* t = find_attr(attrs, "title")) current.redirect_target = t;
      }
    } else if (depth == 4 && name == "text" && path[2] == "revision") {
      begin_field(Field::Text);
    }
  }

  void begin_field(Field f) {
    field = f;
    buf.clear();
  }

  void end(std::string_view name) {
    const std::size_t depth = path.size();
    if (in_page && field != Field::None) {
      switch (field) {
        case Field::Title: current.title = buf; break;
        case Field::Ns: current.ns = parse_int<int>(buf); break;
        case Field::Id:
          current.page_id = parse_int<std::int64_t>(buf);
          have_page_id = true;
          break;
        case Field::Text: current.wikitext = std::move(buf); break;
        case Field::None: break;
      }
      field = Field::None;
      buf.clear();
    }
    if (depth == 2 && name == "page" && in_page) finish_page();
    path.pop_back();
  }

  template <typename T>
  T parse_int(std::string_view s) {
    s = trim(s);
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      XML_StopParser(parser, XML_FALSE);
      error.emplace("non-numeric value '" + std::string(s) + "'",
                    static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser)));
    }
    return v;
  }

  void finish_page() {
    in_page = false;
    auto markup_target = parse_redirect_markup(current.wikitext);
    current.is_redirect = have_redirect_element || markup_target.has_value();
    if (current.is_redirect && current.redirect_target.empty() && markup_target) {
      current.redirect_target = *markup_target;
    }
    if (current.ns == 0 && !current.title.empty()) {
      ready.push_back(std::move(current));
    } else {
      ++skipped;
    }
    current = RawPage{};
  }

  void feed() {
    void* dst = XML_GetBuffer(parser, static_cast<int>(kChunkSize));
    if (!dst) throw Error("XML parser out of memory");
    std::streamsize got = 0;
    try {
      stream.read(static_cast<char*>(dst), static_cast<std::streamsize>(kChunkSize));
      got = stream.gcount();
    } catch (const std::exception& e) {
      error.emplace(std::string("decompression failed: ") + e.what(),
                    static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser)));
      return;
    }
    const bool last = got < static_cast<std::streamsize>(kChunkSize);
    if (XML_ParseBuffer(parser, static_cast<int>(got), last ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
      if (!error) {
        error.emplace(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser)),
                      static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser)));
      }
      return;
    }
    if (last) finished = true;
  }
};

DumpReader::DumpReader(const std::filesystem::path& path) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw Error("cannot open dump " + path.string());
  impl_ = std::make_unique<Impl>(*file);
  impl_->owned = std::move(file);
}

DumpReader::DumpReader(std::istream& in) : impl_(std::make_unique<Impl>(in)) {}

DumpReader::~DumpReader() = default;

std::optional<RawPage> DumpReader::next() {
  while (impl_->ready.empty()) {
    if (impl_->error) throw *impl_->error;
    if (impl_->finished) return std::nullopt;
    impl_->feed();
  }
  RawPage page = std::move(impl_->ready.front());
  impl_->ready.pop_front();
  return page;
}

Compression DumpReader::compression() const { return impl_->compression; }

std::size_t DumpReader::skipped_non_article_pages() const { return impl_->skipped; }

std::vector<RawPage> parse_dump(std::istream& in) {
  DumpReader reader(in);
  std::vector<RawPage> pages;
  while (auto page = reader.next()) pages.push_back(std::move(*page));
  return pages;
}

}  // namespace kilm::ingest

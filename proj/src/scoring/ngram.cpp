#include "kilm/scoring/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "kilm/error.hpp"
#include "kilm/ingest/serialize.hpp"
#include "kilm/tokenizer.hpp"
#include "kilm/util/parallel.hpp"

namespace kilm::scoring {

namespace {

const std::string kBos = "\x02<bos>";
constexpr char kJoin = '\x1f';

std::vector<std::string> padded(std::size_t order, std::span<const std::string> history) {
  const std::size_t n = order - 1;
  std::vector<std::string> out;
  out.reserve(n);
  const std::size_t have = std::min(n, history.size());
  for (std::size_t i = have; i < n; ++i) out.push_back(kBos);
  out.insert(out.end(), history.end() - static_cast<std::ptrdiff_t>(have), history.end());
  return out;
}

}  // namespace

NGramModel NGramModel::train(const std::vector<std::vector<std::string>>& sequences, std::size_t order,
                             double delta) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("n-gram delta must be > 0");
  NGramModel m;
  m.order_ = order;
  m.delta_ = delta;
  std::unordered_map<std::string, bool> seen;
  std::size_t tokens = 0;
  for (const auto& seq : sequences) {
    std::vector<std::string> history(order - 1, kBos);
    for (const auto& w : seq) {
      std::span<const std::string> h(history);
      auto& ctx = m.contexts_[m.context_key(h.subspan(h.size() - (order - 1)))];
      ++ctx.counts[w];
      ++ctx.total;
      seen.emplace(w, true);
      history.push_back(w);
      ++tokens;
    }
  }
  if (tokens == 0) throw std::invalid_argument("n-gram corpus is empty");
  for (const auto& [w, _] : seen) m.vocab_.push_back(w);
  std::sort(m.vocab_.begin(), m.vocab_.end());
  return m;
}

std::string NGramModel::context_key(std::span<const std::string> history) const {
  std::string key;
  for (const auto& w : history) {
    key += w;
    key.push_back(kJoin);
  }
  return key;
}

const NGramModel::Context* NGramModel::find_context(std::span<const std::string> history) const {
  auto it = contexts_.find(context_key(padded(order_, history)));
  return it == contexts_.end() ? nullptr : &it->second;
}

bool NGramModel::in_vocabulary(const std::string& w) const {
  return std::binary_search(vocab_.begin(), vocab_.end(), w);
}

std::size_t NGramModel::count(std::span<const std::string> context, const std::string& w) const {
  const auto* ctx = find_context(context);
  if (!ctx) return 0;
  auto it = ctx->counts.find(w);
  return it == ctx->counts.end() ? 0 : it->second;
}

std::size_t NGramModel::context_total(std::span<const std::string> context) const {
  const auto* ctx = find_context(context);
  return ctx ? ctx->total : 0;
}

double NGramModel::prob(std::span<const std::string> history, const std::string& w) const {
  const auto* ctx = find_context(history);
  const double total = ctx ? static_cast<double>(ctx->total) : 0.0;
  double c = 0.0;
  if (ctx && in_vocabulary(w)) {
    auto it = ctx->counts.find(w);
    if (it != ctx->counts.end()) c = static_cast<double>(it->second);
  }
  return (c + delta_) / (total + delta_ * static_cast<double>(vocab_.size() + 1));
}

double NGramModel::unk_prob(std::span<const std::string> history) const {
  const auto* ctx = find_context(history);
  const double total = ctx ? static_cast<double>(ctx->total) : 0.0;
  return delta_ / (total + delta_ * static_cast<double>(vocab_.size() + 1));
}

std::vector<double> NGramModel::score(std::span<const std::string> prefix,
                                      std::span<const std::string> continuation) const {
  std::vector<std::string> history(prefix.begin(), prefix.end());
  std::vector<double> out;
  out.reserve(continuation.size());
  for (const auto& w : continuation) {
    out.push_back(std::log(prob(history, w)));
    history.push_back(w);
  }
  return out;
}

std::vector<std::string> NGramModel::generate(std::span<const std::string> prefix, const std::string& stop_token,
                                              std::size_t max_new_tokens) const {
  std::vector<std::string> history(prefix.begin(), prefix.end());
  std::vector<std::string> out;
  while (out.size() < max_new_tokens) {
    const auto* ctx = find_context(history);
    const std::string* best = &vocab_.front();
    std::size_t best_count = 0;
    if (ctx) {
      for (const auto& w : vocab_) {
        auto it = ctx->counts.find(w);
        const std::size_t c = it == ctx->counts.end() ? 0 : it->second;
        if (c > best_count) {
          best_count = c;
          best = &w;
        }
      }
    }
    if (!stop_token.empty() && *best == stop_token) break;
    out.push_back(*best);
    history.push_back(*best);
  }
  return out;
}

ScoreResponse NGramModel::respond(const ScoreRequest& req) const {
  ScoreResponse r;
  r.id = req.id;
  switch (req.verb) {
    case Verb::Score: {
      auto prefix = split_whitespace(req.decoder_prefix);
      auto cont = split_whitespace(req.continuation);
      r.token_logprobs = score(prefix, cont);
      break;
    }
    case Verb::Generate: {
      auto prefix = split_whitespace(req.decoder_prefix);
      auto words = generate(prefix, req.stop_token, req.max_new_tokens);
      std::string text;
      for (const auto& w : words) {
        if (!text.empty()) text.push_back(' ');
        text += w;
      }
      r.generated_text = std::move(text);
      break;
    }
    case Verb::Tokenize:
      r.token_count = count_words(req.text);
      break;
  }
  return r;
}

std::vector<std::vector<std::string>> read_ngram_corpus(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> out;
  if (std::filesystem::is_directory(path)) {
    const auto slices = path / ingest::kSlicesFile;
    if (!std::filesystem::exists(slices)) throw std::runtime_error("no " + slices.string());
    for (const auto& s : ingest::read_slices(slices)) out.push_back(split_whitespace(render(s.tokens)));
    return out;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open n-gram corpus " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    auto words = split_whitespace(line);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

std::vector<ScoreResponse> NGramScorer::run(const std::vector<ScoreRequest>& requests) {
  std::vector<ScoreResponse> out(requests.size());
  parallel_for(requests.size(), jobs_, [&](std::size_t i) { out[i] = model_.respond(requests[i]); });
  return out;
}

}  // namespace kilm::scoring

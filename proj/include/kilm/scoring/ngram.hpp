#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kilm/scoring/protocol.hpp"

namespace kilm::scoring {

// Add-delta smoothed n-gram model over whitespace tokens:
// P(w | ctx) = (c(ctx, w) + delta) / (c(ctx) + delta * (|V| + 1)),
// the +1 being the unknown word. Contexts are padded with a begin symbol that
// is not part of the vocabulary. Immutable after training.
class NGramModel {
 public:
  // Throws std::invalid_argument for order < 1, delta <= 0 or an empty corpus.
  static NGramModel train(const std::vector<std::vector<std::string>>& sequences, std::size_t order, double delta);

  std::size_t order() const { return order_; }
  double delta() const { return delta_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  bool in_vocabulary(const std::string& w) const;

  // history: the tokens before w (unpadded; only the last order-1 are used).
  double prob(std::span<const std::string> history, const std::string& w) const;
  double unk_prob(std::span<const std::string> history) const;

  std::size_t count(std::span<const std::string> context, const std::string& w) const;
  std::size_t context_total(std::span<const std::string> context) const;

  // Natural-log probabilities of each continuation token given prefix tokens.
  std::vector<double> score(std::span<const std::string> prefix, std::span<const std::string> continuation) const;

  // Greedy argmax over the sorted vocabulary (ties to the first), stopping
  // at stop_token (not emitted) or after max_new_tokens.
  std::vector<std::string> generate(std::span<const std::string> prefix, const std::string& stop_token,
                                    std::size_t max_new_tokens) const;

  // Encoder text is ignored: the model only sees decoder-side text.
  ScoreResponse respond(const ScoreRequest& req) const;

 private:
  struct Context {
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t total = 0;
  };
  std::string context_key(std::span<const std::string> history) const;
  const Context* find_context(std::span<const std::string> history) const;

  std::size_t order_ = 1;
  double delta_ = 1.0;
  std::vector<std::string> vocab_;  // sorted
  std::unordered_map<std::string, Context> contexts_;
};

// Whitespace-token sequences from a text file (one sequence per line) or a
// corpus directory (rendered slices).
std::vector<std::vector<std::string>> read_ngram_corpus(const std::filesystem::path& path);

class NGramScorer : public Scorer {
 public:
  explicit NGramScorer(NGramModel model, unsigned jobs = 1) : model_(std::move(model)), jobs_(jobs) {}
  std::vector<ScoreResponse> run(const std::vector<ScoreRequest>& requests) override;
  const NGramModel& model() const { return model_; }

 private:
  NGramModel model_;
  unsigned jobs_;
};

}  // namespace kilm::scoring

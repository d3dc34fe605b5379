#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kilm/prompt/prompt.hpp"
#include "kilm/scoring/protocol.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::scoring {

enum class RankMode { Sum, Perplexity };

std::string_view to_string(RankMode m);
RankMode rank_mode_from(std::string_view s);

struct CandidateScore {
  std::size_t candidate_index = 0;
  double sum_logprob = 0.0;
  double mean_logprob = 0.0;
  double perplexity = 1.0;  // exp(-mean_logprob)
  std::size_t token_count = 0;
};

// An empty continuation scores sum 0, mean 0, perplexity 1.
CandidateScore candidate_score(std::size_t index, std::span<const double> logprobs);

// Sum: argmax sum_logprob. Perplexity: argmin perplexity. Values within a
// relative 1e-12 count as tied; ties go to the lowest candidate index.
std::size_t select_winner(std::span<const CandidateScore> scores, RankMode mode);

struct RankResult {
  std::optional<std::size_t> winner;  // nullopt when unscored
  std::optional<std::size_t> winner_sum;
  std::optional<std::size_t> winner_perplexity;
  std::vector<CandidateScore> scores;
  std::optional<std::string> error;

  bool scored() const { return winner.has_value(); }
};

ScoreRequest request_for(const prompt::Prompt& p, const std::string& id);

// Scores prompts of one instance. Any failed candidate marks the instance
// unscored, with the scorer's message in `error`.
RankResult rank_from_responses(const std::vector<prompt::Prompt>& prompts,
                               const std::vector<ScoreResponse>& responses, RankMode mode);
RankResult rank_candidates(const std::vector<prompt::Prompt>& prompts, Scorer& scorer, RankMode mode);

struct RankReport {
  std::size_t groups = 0;
  std::size_t requests = 0;
  std::size_t scored = 0;
  std::size_t unscored = 0;
  std::size_t generated = 0;
  std::size_t failed_generations = 0;

  Json to_json() const;
};

// Groups prompts by group_id (first-seen order), sends every request to the
// scorer in one batch, and returns one result record per group: ranking
// records for scoring prompts, generation records otherwise.
std::vector<Json> rank_prompts(const std::vector<prompt::Prompt>& prompts, Scorer& scorer, RankMode mode,
                               RankReport& report);

}  // namespace kilm::scoring

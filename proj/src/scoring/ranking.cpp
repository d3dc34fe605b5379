#include "kilm/scoring/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "kilm/error.hpp"

namespace kilm::scoring {

namespace {

constexpr double kTieTolerance = 1e-12;

bool tied(double a, double b) {
  return std::fabs(a - b) <= kTieTolerance * std::max({1.0, std::fabs(a), std::fabs(b)});
}

Json score_json(const CandidateScore& s, const prompt::Prompt& p) {
  Json j;
  j["candidate_index"] = s.candidate_index;
  j["title"] = p.candidate_title ? Json(*p.candidate_title) : Json(nullptr);
  j["sum_logprob"] = s.sum_logprob;
  j["mean_logprob"] = s.mean_logprob;
  j["perplexity"] = s.perplexity;
  j["token_count"] = s.token_count;
  return j;
}

Json opt_index(const std::optional<std::size_t>& i) { return i ? Json(*i) : Json(nullptr); }

}  // namespace

std::string_view to_string(RankMode m) { return m == RankMode::Sum ? "sum" : "perplexity"; }

RankMode rank_mode_from(std::string_view s) {
  if (s == "sum") return RankMode::Sum;
  if (s == "perplexity" || s == "ppl") return RankMode::Perplexity;
  throw ConfigError("unknown ranking mode '" + std::string(s) + "' (expected sum|perplexity)");
}

CandidateScore candidate_score(std::size_t index, std::span<const double> logprobs) {
  CandidateScore s;
  s.candidate_index = index;
  s.token_count = logprobs.size();
  for (double v : logprobs) s.sum_logprob += v;
  if (s.token_count > 0) {
    s.mean_logprob = s.sum_logprob / static_cast<double>(s.token_count);
    s.perplexity = std::exp(-s.mean_logprob);
  }
  return s;
}

std::size_t select_winner(std::span<const CandidateScore> scores, RankMode mode) {
  if (scores.empty()) throw std::invalid_argument("select_winner: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const bool better = mode == RankMode::Sum ? scores[i].sum_logprob > scores[best].sum_logprob
                                              : scores[i].perplexity < scores[best].perplexity;
    const bool same = mode == RankMode::Sum ? tied(scores[i].sum_logprob, scores[best].sum_logprob)
                                            : tied(scores[i].perplexity, scores[best].perplexity);
    if (better && !same) best = i;
  }
  return scores[best].candidate_index;
}

ScoreRequest request_for(const prompt::Prompt& p, const std::string& id) {
  if (p.continuation) return score_request(id, p.encoder_text, p.decoder_prefix, *p.continuation);
  return generate_request(id, p.encoder_text, p.decoder_prefix, p.stop_token.value_or(""),
                          p.max_new_tokens.value_or(64));
}

RankResult rank_from_responses(const std::vector<prompt::Prompt>& prompts,
                               const std::vector<ScoreResponse>& responses, RankMode mode) {
  if (prompts.empty()) throw std::invalid_argument("rank: no candidates");
  if (responses.size() != prompts.size()) throw std::invalid_argument("rank: response count mismatch");
  RankResult r;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (!prompts[i].continuation) throw FormatError("prompt " + prompts[i].instance_id + " is not a scoring prompt");
    const auto& resp = responses[i];
    if (resp.error || !resp.token_logprobs) {
      r.error = resp.error.value_or("no token_logprobs for " + prompts[i].instance_id);
      r.scores.clear();
      return r;
    }
    r.scores.push_back(candidate_score(prompts[i].candidate_index.value_or(i), *resp.token_logprobs));
  }
  r.winner_sum = select_winner(r.scores, RankMode::Sum);
  r.winner_perplexity = select_winner(r.scores, RankMode::Perplexity);
  r.winner = mode == RankMode::Sum ? r.winner_sum : r.winner_perplexity;
  return r;
}

RankResult rank_candidates(const std::vector<prompt::Prompt>& prompts, Scorer& scorer, RankMode mode) {
  std::vector<ScoreRequest> requests;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    requests.push_back(request_for(prompts[i], prompts[i].instance_id + "/" + std::to_string(i)));
  }
  return rank_from_responses(prompts, scorer.run(requests), mode);
}

Json RankReport::to_json() const {
  return {{"groups", groups},         {"requests", requests},   {"scored", scored},
          {"unscored", unscored},     {"generated", generated}, {"failed_generations", failed_generations}};
}

std::vector<Json> rank_prompts(const std::vector<prompt::Prompt>& prompts, Scorer& scorer, RankMode mode,
                               RankReport& report) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(prompts[i].group_id);
    if (inserted) order.push_back(prompts[i].group_id);
    it->second.push_back(i);
  }
  std::vector<ScoreRequest> requests;
  requests.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) requests.push_back(request_for(prompts[i], "r" + std::to_string(i)));
  auto responses = scorer.run(requests);
  if (responses.size() != requests.size()) throw ScorerError("scorer returned the wrong number of responses");
  report.groups += order.size();
  report.requests += requests.size();

  std::vector<Json> out;
  out.reserve(order.size());
  for (const auto& gid : order) {
    const auto& idx = groups[gid];
    const auto& first = prompts[idx.front()];
    Json rec;
    rec["instance_id"] = gid;
    rec["task"] = first.task;
    if (first.is_scoring()) {
      std::vector<prompt::Prompt> ps;
      std::vector<ScoreResponse> rs;
      for (auto i : idx) {
        ps.push_back(prompts[i]);
        rs.push_back(responses[i]);
      }
      auto r = rank_from_responses(ps, rs, mode);
      rec["mode"] = std::string(to_string(mode));
      rec["scored"] = r.scored();
      std::optional<std::string> predicted;
      if (r.winner) {
        for (const auto& p : ps) {
          if (p.candidate_index.value_or(0) == *r.winner) predicted = p.candidate_title;
        }
      }
      rec["predicted_index"] = opt_index(r.winner);
      rec["predicted_title"] = predicted ? Json(*predicted) : Json(nullptr);
      rec["gold_title"] = first.gold_title ? Json(*first.gold_title) : Json(nullptr);
      rec["in_kb"] = first.in_kb;
      rec["winner_sum"] = opt_index(r.winner_sum);
      rec["winner_perplexity"] = opt_index(r.winner_perplexity);
      Json scores = Json::array();
      for (std::size_t k = 0; k < r.scores.size(); ++k) scores.push_back(score_json(r.scores[k], ps[k]));
      rec["scores"] = std::move(scores);
      if (r.error) rec["error"] = *r.error;
      ++(r.scored() ? report.scored : report.unscored);
    } else {
      const auto& resp = responses[idx.front()];
      const bool ok = resp.ok() && resp.generated_text;
      rec["scored"] = ok;
      rec["generated"] = ok ? Json(*resp.generated_text) : Json(nullptr);
      rec["golds"] = first.golds;
      if (first.gold_title) rec["gold_title"] = *first.gold_title;
      if (!ok) rec["error"] = resp.error.value_or("no generated_text");
      ++(ok ? report.generated : report.failed_generations);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace kilm::scoring

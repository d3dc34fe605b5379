#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kilm/util/jsonl.hpp"

namespace kilm::scoring {

enum class Verb { Score, Generate, Tokenize };

std::string_view to_string(Verb v);
Verb verb_from(std::string_view s);

struct ScoreRequest {
  std::string id;
  Verb verb = Verb::Score;
  std::string encoder_text;
  std::string decoder_prefix;
  std::string continuation;  // score
  std::string stop_token;    // generate
  std::size_t max_new_tokens = 0;
  std::string text;  // tokenize

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct ScoreResponse {
  std::string id;
  std::optional<std::vector<double>> token_logprobs;
  std::optional<std::string> generated_text;
  std::optional<std::size_t> token_count;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
  static ScoreResponse failure(std::string id, std::string message);

  friend bool operator==(const ScoreResponse&, const ScoreResponse&) = default;
};

ScoreRequest score_request(std::string id, std::string encoder_text, std::string decoder_prefix,
                           std::string continuation);
ScoreRequest generate_request(std::string id, std::string encoder_text, std::string decoder_prefix,
                              std::string stop_token, std::size_t max_new_tokens);
ScoreRequest tokenize_request(std::string id, std::string text);

// Only the fields of the request's verb are written.
Json to_json(const ScoreRequest& r);
Json to_json(const ScoreResponse& r);

// Strict parsers; ProtocolError on schema violations.
ScoreRequest request_from_json(const Json& j);
ScoreResponse response_from_json(const Json& j);
ScoreResponse parse_response_line(std::string_view line);

// Empty when `resp` is a valid answer to `req`; otherwise the problem.
std::optional<std::string> check_response(const ScoreRequest& req, const ScoreResponse& resp);

struct TranscriptReport {
  std::size_t requests = 0;
  std::size_t responses = 0;
  std::size_t errors = 0;  // well-formed error responses
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
  Json to_json() const;
};

// Every request id answered exactly once with a response of the right shape;
// no unknown or duplicate ids.
TranscriptReport validate_transcript(const std::vector<ScoreRequest>& requests,
                                     const std::vector<ScoreResponse>& responses);

// Reads JSON-lines files; malformed lines become problems in the report.
TranscriptReport validate_transcript_files(const std::string& requests_path, const std::string& responses_path);

// Batch interface shared by the built-in and subprocess scorers. Responses
// come back in request order.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<ScoreResponse> run(const std::vector<ScoreRequest>& requests) = 0;
};

}  // namespace kilm::scoring

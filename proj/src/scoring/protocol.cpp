#include "kilm/scoring/protocol.hpp"

#include <fstream>
#include <unordered_map>

#include "kilm/error.hpp"

namespace kilm::scoring {

std::string_view to_string(Verb v) {
  switch (v) {
    case Verb::Score: return "score";
    case Verb::Generate: return "generate";
    case Verb::Tokenize: return "tokenize";
  }
  return "score";
}

Verb verb_from(std::string_view s) {
  if (s == "score") return Verb::Score;
  if (s == "generate") return Verb::Generate;
  if (s == "tokenize") return Verb::Tokenize;
  throw ProtocolError("unknown verb '" + std::string(s) + "'");
}

ScoreResponse ScoreResponse::failure(std::string id, std::string message) {
  ScoreResponse r;
  r.id = std::move(id);
  r.error = std::move(message);
  return r;
}

ScoreRequest score_request(std::string id, std::string encoder_text, std::string decoder_prefix,
                           std::string continuation) {
  ScoreRequest r;
  r.id = std::move(id);
  r.verb = Verb::Score;
  r.encoder_text = std::move(encoder_text);
  r.decoder_prefix = std::move(decoder_prefix);
  r.continuation = std::move(continuation);
  return r;
}

ScoreRequest generate_request(std::string id, std::string encoder_text, std::string decoder_prefix,
                              std::string stop_token, std::size_t max_new_tokens) {
  ScoreRequest r;
  r.id = std::move(id);
  r.verb = Verb::Generate;
  r.encoder_text = std::move(encoder_text);
  r.decoder_prefix = std::move(decoder_prefix);
  r.stop_token = std::move(stop_token);
  r.max_new_tokens = max_new_tokens;
  return r;
}

ScoreRequest tokenize_request(std::string id, std::string text) {
  ScoreRequest r;
  r.id = std::move(id);
  r.verb = Verb::Tokenize;
  r.text = std::move(text);
  return r;
}

Json to_json(const ScoreRequest& r) {
  Json j;
  j["id"] = r.id;
  j["verb"] = std::string(to_string(r.verb));
  switch (r.verb) {
    case Verb::Score:
      j["encoder_text"] = r.encoder_text;
      j["decoder_prefix"] = r.decoder_prefix;
      j["continuation"] = r.continuation;
      break;
    case Verb::Generate:
      j["encoder_text"] = r.encoder_text;
      j["decoder_prefix"] = r.decoder_prefix;
      j["stop_token"] = r.stop_token;
      j["max_new_tokens"] = r.max_new_tokens;
      break;
    case Verb::Tokenize:
      j["text"] = r.text;
      break;
  }
  return j;
}

Json to_json(const ScoreResponse& r) {
  Json j;
  j["id"] = r.id;
  if (r.error) {
    j["error"] = *r.error;
  } else if (r.token_logprobs) {
    j["token_logprobs"] = *r.token_logprobs;
  } else if (r.generated_text) {
    j["generated_text"] = *r.generated_text;
  } else if (r.token_count) {
    j["token_count"] = *r.token_count;
  }
  return j;
}

namespace {

const std::string& require_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ProtocolError(std::string("missing string field '") + key + "'");
  return it->get_ref<const std::string&>();
}

std::string id_of(const Json& j) {
  if (!j.is_object()) throw ProtocolError("protocol record is not a JSON object");
  return require_string(j, "id");
}

}  // namespace

ScoreRequest request_from_json(const Json& j) {
  ScoreRequest r;
  r.id = id_of(j);
  r.verb = verb_from(require_string(j, "verb"));
  switch (r.verb) {
    case Verb::Score:
      r.encoder_text = require_string(j, "encoder_text");
      r.decoder_prefix = require_string(j, "decoder_prefix");
      r.continuation = require_string(j, "continuation");
      break;
    case Verb::Generate: {
      r.encoder_text = require_string(j, "encoder_text");
      r.decoder_prefix = require_string(j, "decoder_prefix");
      r.stop_token = require_string(j, "stop_token");
      auto it = j.find("max_new_tokens");
      if (it == j.end() || !it->is_number_unsigned()) throw ProtocolError("missing max_new_tokens");
      r.max_new_tokens = it->get<std::size_t>();
      break;
    }
    case Verb::Tokenize:
      r.text = require_string(j, "text");
      break;
  }
  return r;
}

ScoreResponse response_from_json(const Json& j) {
  ScoreResponse r;
  r.id = id_of(j);
  int payloads = 0;
  if (auto it = j.find("error"); it != j.end()) {
    if (!it->is_string()) throw ProtocolError("error must be a string");
    r.error = it->get<std::string>();
    ++payloads;
  }
  if (auto it = j.find("token_logprobs"); it != j.end()) {
    if (!it->is_array()) throw ProtocolError("token_logprobs must be an array");
    std::vector<double> lp;
    for (const auto& v : *it) {
      if (!v.is_number()) throw ProtocolError("token_logprobs must hold numbers");
      lp.push_back(v.get<double>());
    }
    r.token_logprobs = std::move(lp);
    ++payloads;
  }
  if (auto it = j.find("generated_text"); it != j.end()) {
    if (!it->is_string()) throw ProtocolError("generated_text must be a string");
    r.generated_text = it->get<std::string>();
    ++payloads;
  }
  if (auto it = j.find("token_count"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ProtocolError("token_count must be a non-negative integer");
    r.token_count = it->get<std::size_t>();
    ++payloads;
  }
  if (payloads != 1) throw ProtocolError("response " + r.id + " must carry exactly one payload field");
  return r;
}

ScoreResponse parse_response_line(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error&) {
    throw ProtocolError("malformed response line: " + std::string(line));
  }
  try {
    return response_from_json(j);
  } catch (const ProtocolError& e) {
    throw ProtocolError(std::string(e.what()) + ": " + std::string(line));
  }
}

std::optional<std::string> check_response(const ScoreRequest& req, const ScoreResponse& resp) {
  if (req.id != resp.id) return "id mismatch: " + req.id + " vs " + resp.id;
  if (resp.error) return std::nullopt;
  switch (req.verb) {
    case Verb::Score:
      if (!resp.token_logprobs) return "score response " + resp.id + " lacks token_logprobs";
      for (double v : *resp.token_logprobs) {
        if (!(v <= 0.0)) return "score response " + resp.id + " has a logprob above 0";
      }
      break;
    case Verb::Generate:
      if (!resp.generated_text) return "generate response " + resp.id + " lacks generated_text";
      break;
    case Verb::Tokenize:
      if (!resp.token_count) return "tokenize response " + resp.id + " lacks token_count";
      break;
  }
  return std::nullopt;
}

Json TranscriptReport::to_json() const {
  return {{"ok", ok()}, {"requests", requests}, {"responses", responses}, {"errors", errors}, {"problems", problems}};
}

TranscriptReport validate_transcript(const std::vector<ScoreRequest>& requests,
                                     const std::vector<ScoreResponse>& responses) {
  TranscriptReport report;
  report.requests = requests.size();
  report.responses = responses.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!index.emplace(requests[i].id, i).second) report.problems.push_back("duplicate request id " + requests[i].id);
  }
  std::vector<int> answered(requests.size(), 0);
  for (const auto& r : responses) {
    auto it = index.find(r.id);
    if (it == index.end()) {
      report.problems.push_back("response for unknown id " + r.id);
      continue;
    }
    if (++answered[it->second] > 1) report.problems.push_back("id " + r.id + " answered more than once");
    if (r.error) ++report.errors;
    if (auto p = check_response(requests[it->second], r)) report.problems.push_back(*p);
  }
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (answered[i] == 0) report.problems.push_back("id " + requests[i].id + " unanswered");
  }
  return report;
}

TranscriptReport validate_transcript_files(const std::string& requests_path, const std::string& responses_path) {
  std::vector<ScoreRequest> requests;
  std::vector<ScoreResponse> responses;
  std::vector<std::string> problems;
  auto read = [&](const std::string& path, auto&& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        fn(Json::parse(line));
      } catch (const std::exception& e) {
        problems.push_back(path + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  };
  read(requests_path, [&](const Json& j) { requests.push_back(request_from_json(j)); });
  read(responses_path, [&](const Json& j) { responses.push_back(response_from_json(j)); });
  auto report = validate_transcript(requests, responses);
  report.problems.insert(report.problems.begin(), problems.begin(), problems.end());
  return report;
}

}  // namespace kilm::scoring

// Test double speaking the scorer wire protocol on stdin/stdout.
//
//   fake_scorer [--logprob X] [--table FILE] [--reverse N] [--crash-after N]
//               [--malformed-after N] [--hang-after N] [--error-every N]
//               [--unknown-id-after N] [--duplicate-after N]
//
// score: X per whitespace token of the continuation (default -1.0), or the
// list stored under the continuation in the JSON table. generate: the first
// word of the prefix repeated up to max_new_tokens. tokenize: word count.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

using Json = nlohmann::ordered_json;

namespace {

struct Options {
  double logprob = -1.0;
  Json table = Json::object();
  std::size_t reverse = 0;
  long crash_after = -1;
  long malformed_after = -1;
  long hang_after = -1;
  long error_every = 0;
  long unknown_id_after = -1;
  long duplicate_after = -1;
};

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Json answer(const Json& req, const Options& o, long n) {
  Json resp;
  resp["id"] = req.at("id");
  if (o.error_every > 0 && n % o.error_every == 0) {
    resp["error"] = "injected failure";
    return resp;
  }
  const std::string verb = req.at("verb");
  if (verb == "score") {
    const std::string cont = req.at("continuation");
    if (o.table.contains(cont)) {
      resp["token_logprobs"] = o.table.at(cont);
    } else {
      resp["token_logprobs"] = std::vector<double>(words(cont).size(), o.logprob);
    }
  } else if (verb == "generate") {
    auto prefix = words(req.at("decoder_prefix"));
    std::string out;
    const std::size_t n_new = req.at("max_new_tokens");
    for (std::size_t i = 0; i < n_new && !prefix.empty(); ++i) out += (i ? " " : "") + prefix.front();
    resp["generated_text"] = out;
  } else if (verb == "tokenize") {
    resp["token_count"] = words(req.at("text")).size();
  } else {
    resp["error"] = "unknown verb";
  }
  return resp;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    std::string value = argv[i + 1];
    if (flag == "--logprob") o.logprob = std::stod(value);
    else if (flag == "--table") o.table = Json::parse(std::ifstream(value));
    else if (flag == "--reverse") o.reverse = std::stoul(value);
    else if (flag == "--crash-after") o.crash_after = std::stol(value);
    else if (flag == "--malformed-after") o.malformed_after = std::stol(value);
    else if (flag == "--hang-after") o.hang_after = std::stol(value);
    else if (flag == "--error-every") o.error_every = std::stol(value);
    else if (flag == "--unknown-id-after") o.unknown_id_after = std::stol(value);
    else if (flag == "--duplicate-after") o.duplicate_after = std::stol(value);
    else {
      std::cerr << "unknown flag " << flag << "\n";
      return 2;
    }
  }

  long answered = 0;
  std::vector<Json> pending;
  auto emit = [&](const Json& resp) {
    if (answered == o.crash_after) std::_Exit(3);
    if (answered == o.hang_after) {
      std::cout.flush();
      for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
    }
    if (answered == o.malformed_after) {
      std::cout << "this is not json\n" << std::flush;
      return;
    }
    Json out = resp;
    if (answered == o.unknown_id_after) out["id"] = "no-such-id";
    std::cout << out.dump() << "\n";
    if (answered == o.duplicate_after) std::cout << out.dump() << "\n";
    ++answered;
  };
  auto flush_pending = [&] {
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) emit(*it);
    pending.clear();
    std::cout.flush();
  };

  long seen = 0;
  for (std::string line; std::getline(std::cin, line);) {
    if (line.empty()) continue;
    Json resp = answer(Json::parse(line), o, ++seen);
    if (o.reverse > 0) {
      pending.push_back(std::move(resp));
      if (pending.size() >= o.reverse) flush_pending();
    } else {
      emit(resp);
      std::cout.flush();
    }
  }
  flush_pending();
  return 0;
}

#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kilm/scoring/protocol.hpp"

namespace kilm::scoring {

struct SubprocessOptions {
  std::size_t max_inflight = 32;
  // Longest wait for any progress from the child before giving up.
  std::chrono::milliseconds timeout{60000};
};

struct SubprocessReport {
  std::vector<std::string> unanswered;  // request ids answered with a synthetic error
  bool timed_out = false;
  std::optional<int> exit_status;  // set when the child exited normally
  std::optional<int> signal;       // set when the child was killed by a signal
  std::size_t max_observed_inflight = 0;

  bool clean() const { return unanswered.empty(); }
};

// Speaks the JSON-lines protocol with a child process: requests on its stdin,
// responses on its stdout, matched by id in any order. One child per run().
// A malformed or unexpected response line throws ProtocolError (the child is
// killed first). A child that dies or stalls leaves its outstanding requests
// answered with error responses, listed in last_report().
class SubprocessScorer : public Scorer {
 public:
  explicit SubprocessScorer(std::vector<std::string> argv, SubprocessOptions options = {});

  // Runs `command` through /bin/sh -c.
  static SubprocessScorer from_shell(const std::string& command, SubprocessOptions options = {});

  std::vector<ScoreResponse> run(const std::vector<ScoreRequest>& requests) override;
  const SubprocessReport& last_report() const { return report_; }

 private:
  std::vector<std::string> argv_;
  SubprocessOptions options_;
  SubprocessReport report_;
};

// Adapts a per-request function to the Scorer interface.
class CallbackScorer : public Scorer {
 public:
  using Fn = std::function<ScoreResponse(const ScoreRequest&)>;
  explicit CallbackScorer(Fn fn) : fn_(std::move(fn)) {}
  std::vector<ScoreResponse> run(const std::vector<ScoreRequest>& requests) override;

 private:
  Fn fn_;
};

}  // namespace kilm::scoring

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kilm/cli/manifest.hpp"
#include "kilm/error.hpp"
#include "kilm/infill/compile.hpp"
#include "kilm/ingest/pipeline.hpp"
#include "kilm/scoring/protocol.hpp"
#include "kilm/scoring/ranking.hpp"

namespace kilm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitMissingFile = 3,
  kExitBadInput = 4,
  kExitScorer = 5,
};

class MissingFileError : public Error {
 public:
  using Error::Error;
};

void require_exists(const std::filesystem::path& p, const char* what);

struct ScorerOptions {
  std::string command;  // shell command, or "builtin-ngram"
  std::filesystem::path ngram_corpus;
  std::size_t ngram_order = 3;
  double ngram_delta = 0.1;
  std::size_t max_inflight = 32;
  long long timeout_ms = 60000;
  unsigned jobs = 1;

  void validate() const;
  Json to_json() const;
};

inline constexpr const char* kBuiltinNgram = "builtin-ngram";

// Owns a scorer built from the options; `subprocess()` exposes the
// subprocess report when a child process is used.
class ScorerHandle {
 public:
  explicit ScorerHandle(const ScorerOptions& options);
  scoring::Scorer& get() { return *scorer_; }
  // Throws ScorerError when the last run left requests unanswered.
  void check() const;
  Json report() const;

 private:
  std::unique_ptr<scoring::Scorer> scorer_;
  bool subprocess_ = false;
};

struct CommandResult {
  Manifest manifest;
  int exit_code = kExitOk;
  std::string failure;  // message for a non-zero exit after outputs were written
};

CommandResult cmd_ingest(const ingest::IngestOptions& options);

struct CompileOptions {
  std::filesystem::path corpus;
  std::filesystem::path out_dir;
  infill::CompileConfig config;
};
CommandResult cmd_compile(const CompileOptions& options);

struct PromptOptions {
  std::string task;  // ed | appositive | qa | probe | lama
  std::filesystem::path out_dir;
  std::filesystem::path instances;       // ed (JSON lines)
  std::filesystem::path candidates_tsv;  // ed (benchmark candidate file, needs corpus)
  std::filesystem::path corpus;          // ed with candidates_tsv, probe
  std::filesystem::path input;           // appositive, lama
  std::filesystem::path questions;       // qa
  std::filesystem::path pool;            // qa
  std::size_t k = 5;
  std::size_t window = 100;
  std::size_t max_new_tokens = 64;
  std::size_t limit = 0;  // probe: 0 = no limit
  ScorerOptions scorer;   // lama answer filter
};
CommandResult cmd_prompt(const PromptOptions& options);

struct RankOptions {
  std::filesystem::path prompts;
  std::filesystem::path out_dir;
  scoring::RankMode mode = scoring::RankMode::Perplexity;
  ScorerOptions scorer;
};
CommandResult cmd_rank(const RankOptions& options);

struct EvalOptions {
  std::filesystem::path results;
  std::filesystem::path out_dir;
  std::string metric = "all";
  std::filesystem::path stats;  // optional stats.json for the frequency table
  std::vector<std::size_t> ks{0, 1, 2, 5, 10, 20, 50, 100};
};
CommandResult cmd_eval(const EvalOptions& options);

struct StatsOptions {
  std::filesystem::path corpus;
  std::filesystem::path out_dir;
  std::size_t stride = ingest::kDefaultStride;
  ingest::SliceMode mode = ingest::SliceMode::Primary;
};
CommandResult cmd_stats(const StatsOptions& options);

struct TranscriptOptions {
  std::filesystem::path requests;
  std::filesystem::path responses;
  std::filesystem::path out_dir;
};
// Exit code kExitBadInput when the transcript has problems.
CommandResult cmd_check_transcript(const TranscriptOptions& options);

}  // namespace kilm::cli

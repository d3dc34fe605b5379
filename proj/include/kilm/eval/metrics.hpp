#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kilm/ingest/corpus_stats.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::eval {

struct EDResult {
  std::string instance_id;
  std::optional<std::string> predicted_title;  // present iff scored
  std::optional<std::string> gold_title;
  bool in_kb = true;
  bool scored = false;
};

struct GenResult {
  std::string instance_id;
  std::string generated;
  std::vector<std::string> golds;
};

struct F1Counts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

// Over in-KB instances: unscored ones count toward gold but not predicted.
F1Counts inkb_counts(const std::vector<EDResult>& results);
// MetricError when no instance is in the KB.
double inkb_micro_f1(const std::vector<EDResult>& results);

// Lowercase, drop punctuation, drop the articles a/an/the, collapse spaces.
std::string normalize_answer(const std::string& s);
int exact_match(const GenResult& r);
// Multiset overlap of normalized words; max over golds.
double unigram_f1(const GenResult& r);
double unigram_f1(const std::string& prediction, const std::string& gold);

// Keeps results whose gold entity has corpus frequency >= k.
std::vector<EDResult> min_frequency_filter(const std::vector<EDResult>& results, const ingest::CorpusStats& stats,
                                           std::size_t k);

struct FrequencyRow {
  std::size_t k = 0;
  std::size_t instances = 0;
  std::optional<double> f1;  // nullopt when no in-KB instance is left
};
std::vector<FrequencyRow> frequency_table(const std::vector<EDResult>& results, const ingest::CorpusStats& stats,
                                          const std::vector<std::size_t>& ks);

EDResult ed_result_from_json(const Json& j);
GenResult gen_result_from_json(const Json& j);

// Aggregate report for a results file: ED records get InKB F1 (and the
// per-k table when stats are given), generation records get EM and F1.
// Records may carry a "dataset" field for per-dataset breakdowns.
Json evaluate_records(const std::vector<Json>& records, const std::string& metric,
                      const ingest::CorpusStats* stats, const std::vector<std::size_t>& ks);

}  // namespace kilm::eval

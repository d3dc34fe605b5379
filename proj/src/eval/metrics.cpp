#include "kilm/eval/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include "kilm/error.hpp"
#include "kilm/tokenizer.hpp"

namespace kilm::eval {

double F1Counts::precision() const {
  return predicted == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(predicted);
}

double F1Counts::recall() const { return gold == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold); }

double F1Counts::f1() const {
  const std::size_t denom = predicted + gold;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(correct) / static_cast<double>(denom);
}

F1Counts inkb_counts(const std::vector<EDResult>& results) {
  F1Counts c;
  for (const auto& r : results) {
    if (!r.in_kb) continue;
    ++c.gold;
    if (!r.scored || !r.predicted_title) continue;
    ++c.predicted;
    if (r.gold_title && *r.predicted_title == *r.gold_title) ++c.correct;
  }
  return c;
}

double inkb_micro_f1(const std::vector<EDResult>& results) {
  auto c = inkb_counts(results);
  if (c.gold == 0) throw MetricError("InKB F1 is undefined: no in-KB gold instances");
  return c.f1();
}

std::string normalize_answer(const std::string& s) {
  std::string lowered = to_lower_ascii(s);
  std::string no_punct;
  no_punct.reserve(lowered.size());
  for (char c : lowered) {
    if (!is_ascii_punct(c)) no_punct.push_back(c);
  }
  std::string out;
  for (const auto& w : split_whitespace(no_punct)) {
    if (w == "a" || w == "an" || w == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

int exact_match(const GenResult& r) {
  const std::string p = normalize_answer(r.generated);
  for (const auto& g : r.golds) {
    if (p == normalize_answer(g)) return 1;
  }
  return 0;
}

double unigram_f1(const std::string& prediction, const std::string& gold) {
  const auto p = split_whitespace(normalize_answer(prediction));
  const auto g = split_whitespace(normalize_answer(gold));
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::unordered_map<std::string, std::size_t> bag;
  for (const auto& w : g) ++bag[w];
  std::size_t common = 0;
  for (const auto& w : p) {
    auto it = bag.find(w);
    if (it != bag.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(p.size() + g.size());
}

double unigram_f1(const GenResult& r) {
  double best = 0.0;
  for (const auto& g : r.golds) best = std::max(best, unigram_f1(r.generated, g));
  return best;
}

std::vector<EDResult> min_frequency_filter(const std::vector<EDResult>& results, const ingest::CorpusStats& stats,
                                           std::size_t k) {
  if (k == 0) return results;
  std::vector<EDResult> out;
  for (const auto& r : results) {
    if (r.gold_title && stats.frequency_of(*r.gold_title) >= k) out.push_back(r);
  }
  return out;
}

std::vector<FrequencyRow> frequency_table(const std::vector<EDResult>& results, const ingest::CorpusStats& stats,
                                          const std::vector<std::size_t>& ks) {
  std::vector<FrequencyRow> rows;
  for (auto k : ks) {
    auto kept = min_frequency_filter(results, stats, k);
    FrequencyRow row{k, kept.size(), std::nullopt};
    auto c = inkb_counts(kept);
    if (c.gold > 0) row.f1 = c.f1();
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::optional<std::string> opt_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

bool is_ed_record(const Json& j) { return j.contains("predicted_title") || j.contains("in_kb"); }

}  // namespace

EDResult ed_result_from_json(const Json& j) {
  try {
    EDResult r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.predicted_title = opt_string(j, "predicted_title");
    r.gold_title = opt_string(j, "gold_title");
    r.in_kb = j.value("in_kb", true);
    r.scored = j.value("scored", r.predicted_title.has_value()) && r.predicted_title.has_value();
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad ED result record: ") + e.what());
  }
}

GenResult gen_result_from_json(const Json& j) {
  try {
    GenResult r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.generated = opt_string(j, "generated").value_or("");
    r.golds = j.at("golds").get<std::vector<std::string>>();
    if (r.golds.empty()) throw FormatError("result " + r.instance_id + " has no gold answers");
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad generation result record: ") + e.what());
  }
}

Json evaluate_records(const std::vector<Json>& records, const std::string& metric,
                      const ingest::CorpusStats* stats, const std::vector<std::size_t>& ks) {
  const bool want_ed = metric == "inkb_f1" || metric == "all";
  const bool want_gen = metric == "em" || metric == "f1" || metric == "em_f1" || metric == "all";
  if (!want_ed && !want_gen) throw ConfigError("unknown metric '" + metric + "' (expected inkb_f1|em|f1|em_f1|all)");

  std::map<std::string, std::vector<EDResult>> ed;
  std::map<std::string, std::vector<GenResult>> gen;
  for (const auto& j : records) {
    const std::string dataset = j.value("dataset", std::string("all"));
    if (is_ed_record(j)) {
      if (want_ed) ed[dataset].push_back(ed_result_from_json(j));
    } else if (want_gen) {
      gen[dataset].push_back(gen_result_from_json(j));
    }
  }
  if (want_ed && !want_gen && ed.empty()) throw MetricError("no entity disambiguation records to evaluate");
  if (want_gen && !want_ed && gen.empty()) throw MetricError("no generation records to evaluate");

  Json out;
  out["metric"] = metric;
  if (!ed.empty()) {
    Json per = Json::object();
    std::vector<EDResult> all;
    for (const auto& [name, rs] : ed) {
      auto c = inkb_counts(rs);
      per[name] = {{"instances", rs.size()},
                   {"inkb_gold", c.gold},
                   {"predicted", c.predicted},
                   {"correct", c.correct},
                   {"inkb_f1", c.gold ? Json(c.f1()) : Json(nullptr)}};
      all.insert(all.end(), rs.begin(), rs.end());
    }
    Json agg;
    auto c = inkb_counts(all);
    agg["instances"] = all.size();
    agg["inkb_gold"] = c.gold;
    agg["predicted"] = c.predicted;
    agg["correct"] = c.correct;
    agg["precision"] = c.precision();
    agg["recall"] = c.recall();
    agg["inkb_f1"] = inkb_micro_f1(all);
    Json ed_json;
    ed_json["aggregate"] = std::move(agg);
    ed_json["datasets"] = std::move(per);
    if (stats) {
      Json table = Json::array();
      for (const auto& row : frequency_table(all, *stats, ks)) {
        table.push_back({{"k", row.k}, {"instances", row.instances}, {"inkb_f1", row.f1 ? Json(*row.f1) : Json(nullptr)}});
      }
      ed_json["min_frequency"] = std::move(table);
    }
    out["ed"] = std::move(ed_json);
  }
  if (!gen.empty()) {
    Json per = Json::object();
    double em_all = 0.0;
    double f1_all = 0.0;
    std::size_t n_all = 0;
    for (const auto& [name, rs] : gen) {
      double em = 0.0;
      double f1 = 0.0;
      for (const auto& r : rs) {
        em += exact_match(r);
        f1 += unigram_f1(r);
      }
      per[name] = {{"instances", rs.size()},
                   {"exact_match", em / static_cast<double>(rs.size())},
                   {"unigram_f1", f1 / static_cast<double>(rs.size())}};
      em_all += em;
      f1_all += f1;
      n_all += rs.size();
    }
    out["generation"] = {{"aggregate",
                          {{"instances", n_all},
                           {"exact_match", em_all / static_cast<double>(n_all)},
                           {"unigram_f1", f1_all / static_cast<double>(n_all)}}},
                         {"datasets", std::move(per)}};
  }
  return out;
}

}  // namespace kilm::eval

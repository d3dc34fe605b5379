#include "kilm/cli/commands.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "kilm/eval/metrics.hpp"
#include "kilm/infill/serialize.hpp"
#include "kilm/ingest/serialize.hpp"
#include "kilm/prompt/benchmark.hpp"
#include "kilm/prompt/structured.hpp"
#include "kilm/prompt/tfidf.hpp"
#include "kilm/scoring/ngram.hpp"
#include "kilm/scoring/subprocess.hpp"
#include "kilm/util/parallel.hpp"

namespace kilm::cli {

namespace fs = std::filesystem;

void require_exists(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("missing required ") + what);
  if (!fs::exists(p)) throw MissingFileError(std::string(what) + " not found: " + p.string());
}

namespace {

void prepare_out_dir(const fs::path& out) {
  if (out.empty()) throw ConfigError("an output directory is required (-o)");
  fs::create_directories(out);
}

std::vector<ingest::DocumentSlice> slice_corpus(const fs::path& corpus, std::size_t stride, ingest::SliceMode mode,
                                                unsigned jobs) {
  const auto articles = ingest::read_articles(corpus / ingest::kArticlesFile);
  std::vector<std::vector<ingest::DocumentSlice>> per(articles.size());
  parallel_for(articles.size(), jobs, [&](std::size_t i) { per[i] = ingest::slice_documents(articles[i], stride, mode); });
  std::vector<ingest::DocumentSlice> out;
  for (auto& v : per) {
    for (auto& s : v) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

void ScorerOptions::validate() const {
  if (command.empty()) throw ConfigError("no scorer given (use --scorer or set KILM_SCORER)");
  if (command == kBuiltinNgram) {
    if (ngram_corpus.empty()) throw ConfigError("--ngram-corpus is required for the built-in n-gram scorer");
    if (ngram_order < 1) throw ConfigError("--ngram-order must be >= 1");
    if (!(ngram_delta > 0.0)) throw ConfigError("--ngram-delta must be > 0");
  }
  if (max_inflight == 0) throw ConfigError("--max-inflight must be >= 1");
  if (timeout_ms <= 0) throw ConfigError("--timeout-ms must be > 0");
}

Json ScorerOptions::to_json() const {
  Json j;
  j["scorer"] = command;
  if (command == kBuiltinNgram) {
    j["ngram_corpus"] = ngram_corpus.generic_string();
    j["ngram_order"] = ngram_order;
    j["ngram_delta"] = ngram_delta;
  } else {
    j["max_inflight"] = max_inflight;
    j["timeout_ms"] = timeout_ms;
  }
  return j;
}

ScorerHandle::ScorerHandle(const ScorerOptions& options) {
  options.validate();
  if (options.command == kBuiltinNgram) {
    require_exists(options.ngram_corpus, "n-gram corpus");
    auto model = scoring::NGramModel::train(scoring::read_ngram_corpus(options.ngram_corpus), options.ngram_order,
                                            options.ngram_delta);
    scorer_ = std::make_unique<scoring::NGramScorer>(std::move(model), options.jobs);
    return;
  }
  scoring::SubprocessOptions sub;
  sub.max_inflight = options.max_inflight;
  sub.timeout = std::chrono::milliseconds(options.timeout_ms);
  scorer_ = std::make_unique<scoring::SubprocessScorer>(scoring::SubprocessScorer::from_shell(options.command, sub));
  subprocess_ = true;
}

void ScorerHandle::check() const {
  if (!subprocess_) return;
  const auto& r = static_cast<const scoring::SubprocessScorer&>(*scorer_).last_report();
  if (r.clean()) return;
  std::string msg = std::string(r.timed_out ? "scorer timed out" : "scorer exited early") + " with " +
                    std::to_string(r.unanswered.size()) + " unanswered request(s): ";
  for (std::size_t i = 0; i < r.unanswered.size() && i < 10; ++i) msg += (i ? ", " : "") + r.unanswered[i];
  if (r.unanswered.size() > 10) msg += ", ...";
  throw ScorerError(msg);
}

Json ScorerHandle::report() const {
  if (!subprocess_) return Json::object();
  const auto& r = static_cast<const scoring::SubprocessScorer&>(*scorer_).last_report();
  Json j;
  j["unanswered"] = r.unanswered;
  j["timed_out"] = r.timed_out;
  j["exit_status"] = r.exit_status ? Json(*r.exit_status) : Json(nullptr);
  j["signal"] = r.signal ? Json(*r.signal) : Json(nullptr);
  return j;
}

CommandResult cmd_ingest(const ingest::IngestOptions& options) {
  require_exists(options.dump, "dump");
  if (options.stride < ingest::kMinStride) {
    throw ConfigError("stride must be >= " + std::to_string(ingest::kMinStride));
  }
  if (options.jobs == 0) throw ConfigError("jobs must be >= 1");
  prepare_out_dir(options.out_dir);
  auto report = ingest::run_ingest(options);
  CommandResult r;
  r.manifest.command = "ingest";
  r.manifest.config = {{"stride", options.stride},
                       {"mode", std::string(ingest::to_string(options.mode))},
                       {"skip_title_regex", options.skip_title_regex ? Json(*options.skip_title_regex) : Json(nullptr)}};
  r.manifest.inputs = {options.dump};
  r.manifest.outputs = {ingest::kArticlesFile, ingest::kKnowledgeFile, ingest::kRedirectsFile, ingest::kSlicesFile,
                        ingest::kStatsFile};
  r.manifest.report = report.to_json();
  return r;
}

CommandResult cmd_compile(const CompileOptions& options) {
  options.config.validate();
  require_exists(options.corpus, "corpus directory");
  require_exists(options.corpus / ingest::kArticlesFile, "articles file");
  require_exists(options.corpus / ingest::kKnowledgeFile, "knowledge table");
  prepare_out_dir(options.out_dir);

  const auto table = ingest::read_knowledge_table(options.corpus);
  const auto slices = slice_corpus(options.corpus, options.config.stride, options.config.mode, options.config.jobs);
  JsonlWriter writer(options.out_dir / infill::kTrainFile);
  auto report = infill::compile_corpus(slices, table, options.config,
                                       [&](const infill::TrainingSample& s) { writer.write(infill::to_json(s)); });
  writer.close();

  CommandResult r;
  r.manifest.command = "compile";
  r.manifest.config = options.config.to_json();
  r.manifest.inputs = {options.corpus / ingest::kArticlesFile, options.corpus / ingest::kKnowledgeFile};
  if (fs::exists(options.corpus / ingest::kRedirectsFile)) r.manifest.inputs.push_back(options.corpus / ingest::kRedirectsFile);
  r.manifest.outputs = {infill::kTrainFile};
  r.manifest.report = report.to_json();
  return r;
}

namespace {

std::vector<prompt::Prompt> ed_prompts(const PromptOptions& o, Json& report, std::vector<fs::path>& inputs,
                                       std::vector<fs::path>& outputs) {
  std::vector<prompt::EDInstance> instances;
  if (!o.candidates_tsv.empty()) {
    require_exists(o.candidates_tsv, "candidate file");
    require_exists(o.corpus, "corpus directory");
    const auto table = ingest::read_knowledge_table(o.corpus);
    std::ifstream in(o.candidates_tsv);
    prompt::ConvertReport conv;
    instances = prompt::convert_candidate_tsv(in, table, conv);
    report["convert"] = conv.to_json();
    inputs = {o.candidates_tsv, o.corpus / ingest::kKnowledgeFile};
    JsonlWriter w(o.out_dir / "instances.jsonl");
    for (const auto& inst : instances) w.write(prompt::to_json(inst));
    w.close();
    outputs.push_back("instances.jsonl");
  } else {
    require_exists(o.instances, "ED instances file");
    instances = prompt::read_ed_instances(o.instances);
    inputs = {o.instances};
  }
  std::vector<prompt::Prompt> out;
  for (const auto& inst : instances) {
    auto ps = prompt::build_ed_prompts(inst, o.window);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  report["instances"] = instances.size();
  return out;
}

std::vector<prompt::Prompt> appositive_prompts(const PromptOptions& o, Json& report, std::vector<fs::path>& inputs) {
  require_exists(o.input, "appositive input file");
  inputs = {o.input};
  std::vector<prompt::Prompt> out;
  for (const auto& inst : prompt::read_ed_instances(o.input)) {
    out.push_back(prompt::build_appositive_prompt(inst.id, inst.context, inst.mention, o.window, o.max_new_tokens));
  }
  report["instances"] = out.size();
  return out;
}

std::vector<prompt::Prompt> qa_prompts(const PromptOptions& o, Json& report, std::vector<fs::path>& inputs) {
  require_exists(o.questions, "questions file");
  require_exists(o.pool, "exemplar pool");
  inputs = {o.questions, o.pool};
  const auto questions = prompt::read_qa_pool(o.questions);
  const auto pool = prompt::read_qa_pool(o.pool);
  std::vector<std::string> docs;
  for (const auto& ex : pool) docs.push_back(ex.question);
  const prompt::TfidfIndex index(docs);
  std::vector<prompt::Prompt> out;
  std::size_t n = 0;
  for (const auto& q : questions) {
    ++n;
    std::vector<prompt::QAExemplar> chosen;
    for (const auto& hit : index.query(q.question, o.k + 1)) {
      if (chosen.size() == o.k) break;
      if (pool[hit.index].question == q.question) continue;
      chosen.push_back(pool[hit.index]);
    }
    std::reverse(chosen.begin(), chosen.end());  // most similar next to the test question
    auto p = prompt::build_qa_prompt("qa-" + std::to_string(n), q.question, chosen, o.max_new_tokens);
    p.golds = q.answers;
    out.push_back(std::move(p));
  }
  report["instances"] = out.size();
  report["k"] = o.k;
  return out;
}

std::vector<prompt::Prompt> probe_prompts(const PromptOptions& o, Json& report, std::vector<fs::path>& inputs) {
  require_exists(o.corpus, "corpus directory");
  require_exists(o.corpus / ingest::kSlicesFile, "slices file");
  inputs = {o.corpus / ingest::kSlicesFile, o.corpus / ingest::kKnowledgeFile};
  const auto table = ingest::read_knowledge_table(o.corpus);
  std::vector<prompt::Prompt> out;
  std::size_t missing = 0;
  for (const auto& slice : ingest::read_slices(o.corpus / ingest::kSlicesFile)) {
    for (const auto& m : slice.mentions) {
      if (o.limit && out.size() >= o.limit) break;
      if (!table.lookup(m.entity)) {
        ++missing;
        continue;
      }
      out.push_back(prompt::build_desc_probe(slice, m, table, o.max_new_tokens));
    }
  }
  report["instances"] = out.size();
  report["mentions_without_description"] = missing;
  return out;
}

std::vector<prompt::Prompt> lama_prompts(const PromptOptions& o, Json& report, std::vector<fs::path>& inputs) {
  require_exists(o.input, "cloze input file");
  inputs = {o.input};
  const auto cloze = prompt::read_cloze(o.input);
  ScorerHandle scorer(o.scorer);
  std::vector<scoring::ScoreRequest> requests;
  std::unordered_map<std::string, std::size_t> answer_index;
  for (const auto& c : cloze) {
    if (answer_index.emplace(c.answer, requests.size()).second) {
      requests.push_back(scoring::tokenize_request("t" + std::to_string(requests.size()), c.answer));
    }
  }
  auto responses = scorer.get().run(requests);
  scorer.check();
  std::vector<prompt::Prompt> out;
  std::size_t filtered = 0;
  for (const auto& c : cloze) {
    const auto& resp = responses.at(answer_index.at(c.answer));
    if (!resp.ok() || !resp.token_count) throw ScorerError("tokenize failed for answer '" + c.answer + "'");
    auto p = prompt::build_lama_cloze(c, [&](const std::string&) { return *resp.token_count; });
    if (p) {
      out.push_back(std::move(*p));
    } else {
      ++filtered;
    }
  }
  report["instances"] = cloze.size();
  report["kept"] = out.size();
  report["filtered_multi_token"] = filtered;
  report["scorer"] = o.scorer.to_json();
  return out;
}

}  // namespace

CommandResult cmd_prompt(const PromptOptions& options) {
  prepare_out_dir(options.out_dir);
  CommandResult r;
  r.manifest.command = "prompt " + options.task;
  Json report;
  std::vector<prompt::Prompt> prompts;
  if (options.task == "ed") {
    prompts = ed_prompts(options, report, r.manifest.inputs, r.manifest.outputs);
  } else if (options.task == "appositive") {
    prompts = appositive_prompts(options, report, r.manifest.inputs);
  } else if (options.task == "qa") {
    prompts = qa_prompts(options, report, r.manifest.inputs);
  } else if (options.task == "probe") {
    prompts = probe_prompts(options, report, r.manifest.inputs);
  } else if (options.task == "lama") {
    prompts = lama_prompts(options, report, r.manifest.inputs);
  } else {
    throw ConfigError("unknown prompt task '" + options.task + "'");
  }
  prompt::write_prompts(options.out_dir / "prompts.jsonl", prompts);
  r.manifest.outputs.push_back("prompts.jsonl");
  report["prompts"] = prompts.size();
  r.manifest.config = {{"task", options.task},
                       {"window", options.window},
                       {"k", options.k},
                       {"max_new_tokens", options.max_new_tokens},
                       {"limit", options.limit}};
  r.manifest.report = std::move(report);
  return r;
}

CommandResult cmd_rank(const RankOptions& options) {
  require_exists(options.prompts, "prompts file");
  const auto prompts = prompt::read_prompts(options.prompts);
  ScorerHandle scorer(options.scorer);
  prepare_out_dir(options.out_dir);
  scoring::RankReport report;
  auto records = scoring::rank_prompts(prompts, scorer.get(), options.mode, report);
  JsonlWriter w(options.out_dir / "results.jsonl");
  for (const auto& rec : records) w.write(rec);
  w.close();

  CommandResult r;
  r.manifest.command = "rank";
  r.manifest.config = options.scorer.to_json();
  r.manifest.config["mode"] = std::string(scoring::to_string(options.mode));
  r.manifest.inputs = {options.prompts};
  if (options.scorer.command == kBuiltinNgram) r.manifest.inputs.push_back(options.scorer.ngram_corpus);
  r.manifest.outputs = {"results.jsonl"};
  r.manifest.report = report.to_json();
  r.manifest.report["scorer"] = scorer.report();
  try {
    scorer.check();
  } catch (const ScorerError& e) {
    r.exit_code = kExitScorer;
    r.failure = e.what();
  }
  return r;
}

CommandResult cmd_eval(const EvalOptions& options) {
  require_exists(options.results, "results file");
  std::optional<ingest::CorpusStats> stats;
  if (!options.stats.empty()) {
    require_exists(options.stats, "stats file");
    stats = ingest::stats_from_json(read_json_file(options.stats));
  }
  std::vector<Json> records;
  for_each_jsonl(options.results, [&](const Json& j, std::size_t) { records.push_back(j); });
  auto metrics = eval::evaluate_records(records, options.metric, stats ? &*stats : nullptr, options.ks);
  prepare_out_dir(options.out_dir);
  write_json_file(options.out_dir / "metrics.json", metrics);

  CommandResult r;
  r.manifest.command = "eval";
  r.manifest.config = {{"metric", options.metric}, {"ks", options.ks}};
  r.manifest.inputs = {options.results};
  if (stats) r.manifest.inputs.push_back(options.stats);
  r.manifest.outputs = {"metrics.json"};
  r.manifest.report = metrics;
  return r;
}

CommandResult cmd_stats(const StatsOptions& options) {
  if (options.stride < ingest::kMinStride) {
    throw ConfigError("stride must be >= " + std::to_string(ingest::kMinStride));
  }
  require_exists(options.corpus, "corpus directory");
  require_exists(options.corpus / ingest::kKnowledgeFile, "knowledge table");
  const auto table = ingest::read_knowledge_table(options.corpus);
  ingest::CorpusStatsBuilder builder(table, options.stride);
  CommandResult r;
  r.manifest.inputs = {options.corpus / ingest::kKnowledgeFile};
  if (fs::exists(options.corpus / ingest::kArticlesFile)) {
    for (const auto& s : slice_corpus(options.corpus, options.stride, options.mode, 1)) builder.add(s);
    r.manifest.inputs.push_back(options.corpus / ingest::kArticlesFile);
  }
  const auto stats = builder.finish();
  prepare_out_dir(options.out_dir);
  write_json_file(options.out_dir / ingest::kStatsFile, ingest::to_json(stats));
  r.manifest.command = "stats";
  r.manifest.config = {{"stride", options.stride}, {"mode", std::string(ingest::to_string(options.mode))}};
  r.manifest.outputs = {ingest::kStatsFile};
  r.manifest.report = {{"description_overhead_percent", 100.0 * stats.description_overhead()},
                       {"mean_description_words", stats.mean_description_words},
                       {"slices", stats.slice_count}};
  return r;
}

CommandResult cmd_check_transcript(const TranscriptOptions& options) {
  require_exists(options.requests, "requests file");
  require_exists(options.responses, "responses file");
  auto report = scoring::validate_transcript_files(options.requests.string(), options.responses.string());
  prepare_out_dir(options.out_dir);
  write_json_file(options.out_dir / "transcript_report.json", report.to_json());
  CommandResult r;
  r.manifest.command = "check-transcript";
  r.manifest.inputs = {options.requests, options.responses};
  r.manifest.outputs = {"transcript_report.json"};
  r.manifest.report = report.to_json();
  if (!report.ok()) {
    r.exit_code = kExitBadInput;
    r.failure = "transcript has " + std::to_string(report.problems.size()) + " problem(s); first: " +
                report.problems.front();
  }
  return r;
}

}  // namespace kilm::cli

#include "kilm/cli/app.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "kilm/cli/commands.hpp"
#include "kilm/ingest/slicing.hpp"

namespace kilm::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kConfigKeys = {
    "variant",   "seed",          "epochs",      "mask_prob",   "poisson_lambda", "stride",   "max_len_with_knowledge",
    "mode",      "jobs",          "scorer",      "ngram_corpus", "ngram_order",   "ngram_delta", "max_inflight",
    "timeout_ms", "rank_mode",    "window",      "k",           "max_new_tokens", "metric",   "skip_title_regex"};

std::string dashed(std::string key) {
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

std::string underscored(std::string key) {
  for (auto& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_config_items(const fs::path& path) {
  require_exists(path, "config file");
  std::vector<std::pair<std::string, std::vector<std::string>>> items;
  if (path.extension() == ".json") {
    Json j;
    try {
      j = read_json_file(path);
    } catch (const std::exception& e) {
      throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config " + path.string() + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      std::vector<std::string> vals;
      auto one = [](const Json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw ConfigError("config values must be scalars or lists of scalars");
      };
      if (value.is_array()) {
        for (const auto& v : value) vals.push_back(one(v));
      } else {
        vals.push_back(one(value));
      }
      items.emplace_back(key, std::move(vals));
    }
    return items;
  }
  try {
    for (auto& item : CLI::ConfigTOML().from_file(path.string())) items.emplace_back(item.name, item.inputs);
  } catch (const CLI::Error& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  return items;
}

// Fills options of `sub` not given on the command line from the config file.
void apply_config(CLI::App* sub, const fs::path& path) {
  for (auto& [raw_key, values] : read_config_items(path)) {
    const std::string key = underscored(raw_key);
    if (!kConfigKeys.contains(key)) throw ConfigError("unknown config key '" + raw_key + "'");
    std::string name = key == "rank_mode" ? "--mode" : "--" + dashed(key);
    CLI::Option* opt = sub->get_option_no_throw(name);
    if (!opt || opt->count() > 0) continue;
    for (const auto& v : values) opt->add_result(v);
    opt->run_callback();
  }
}

struct ConfigHook {
  std::string path;
  CLI::App* sub = nullptr;
};

CLI::App* with_config(CLI::App* sub, std::vector<ConfigHook>& hooks) {
  hooks.push_back({"", sub});
  sub->add_option("--config", hooks.back().path, "TOML or JSON file with option values (flags win)");
  return sub;
}

void add_scorer_options(CLI::App* sub, ScorerOptions& s) {
  sub->add_option("--scorer", s.command, "scorer command (run via /bin/sh -c) or 'builtin-ngram'");
  sub->add_option("--ngram-corpus,--ngram_corpus", s.ngram_corpus, "text file or corpus directory for builtin-ngram");
  sub->add_option("--ngram-order,--ngram_order", s.ngram_order, "n-gram order")->capture_default_str();
  sub->add_option("--ngram-delta,--ngram_delta", s.ngram_delta, "add-delta smoothing constant")->capture_default_str();
  sub->add_option("--max-inflight,--max_inflight", s.max_inflight, "unanswered request bound")->capture_default_str();
  sub->add_option("--timeout-ms,--timeout_ms", s.timeout_ms, "scorer stall timeout in milliseconds")
      ->capture_default_str();
}

void fill_scorer_default(ScorerOptions& s) {
  if (!s.command.empty()) return;
  if (const char* env = std::getenv("KILM_SCORER"); env && *env) s.command = env;
}

void report_error(int code, const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Knowledge-infilled corpus compiler and zero-shot probing toolkit", "kilm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::vector<ConfigHook> hooks;
  hooks.reserve(16);

  ingest::IngestOptions ingest_opts;
  std::string ingest_mode = "primary";
  std::string skip_regex;
  auto* ingest = with_config(app.add_subcommand("ingest", "parse a dump into a corpus directory"), hooks);
  ingest->add_option("dump,--dump", ingest_opts.dump, "XML dump (.xml, .xml.bz2, .xml.gz)");
  ingest->add_option("-o,--out", ingest_opts.out_dir, "output directory")->required();
  ingest->add_option("--stride", ingest_opts.stride, "slice length in tokens")->capture_default_str();
  ingest->add_option("--mode", ingest_mode, "primary (summaries) or upscaling (full text)")->capture_default_str();
  ingest->add_option("--jobs", ingest_opts.jobs, "worker threads")->capture_default_str();
  ingest->add_option("--skip-title-regex,--skip_title_regex", skip_regex, "skip pages whose title matches");

  CompileOptions compile_opts;
  std::string variant = "kilm";
  std::string compile_mode = "primary";
  auto* compile = with_config(app.add_subcommand("compile", "emit train.jsonl from a corpus directory"), hooks);
  auto& cc = compile_opts.config;
  compile->add_option("corpus,--corpus", compile_opts.corpus, "corpus directory from ingest");
  compile->add_option("-o,--out", compile_opts.out_dir, "output directory")->required();
  compile->add_option("--variant", variant, "kilm | kilm_end | merge | plain")->capture_default_str();
  compile->add_option("--seed", cc.seed, "run seed")->capture_default_str();
  compile->add_option("--epochs", cc.epochs, "passes over the corpus")->capture_default_str();
  compile->add_option("--mask-prob,--mask_prob", cc.mask_prob, "text-infilling mask ratio")->capture_default_str();
  compile->add_option("--poisson-lambda,--poisson_lambda", cc.poisson_lambda, "span length mean")
      ->capture_default_str();
  compile->add_option("--stride", cc.stride, "slice length in tokens")->capture_default_str();
  compile->add_option("--max-len-with-knowledge,--max_len_with_knowledge", cc.max_len_with_knowledge,
                      "length cap for knowledge-bearing targets")
      ->capture_default_str();
  compile->add_option("--mode", compile_mode, "primary or upscaling")->capture_default_str();
  compile->add_option("--jobs", cc.jobs, "worker threads")->capture_default_str();

  PromptOptions prompt_opts;
  auto* prompt = app.add_subcommand("prompt", "build structured prompts");
  prompt->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    with_config(sub, hooks);
    sub->add_option("-o,--out", prompt_opts.out_dir, "output directory")->required();
    sub->add_option("--max-new-tokens,--max_new_tokens", prompt_opts.max_new_tokens, "generation bound")
        ->capture_default_str();
    sub->add_option("--window", prompt_opts.window, "context tokens around the mention")->capture_default_str();
  };
  auto* p_ed = prompt->add_subcommand("ed", "entity disambiguation candidates");
  add_common(p_ed);
  p_ed->add_option("--instances", prompt_opts.instances, "ED instances (JSON lines)");
  p_ed->add_option("--candidates-tsv,--candidates_tsv", prompt_opts.candidates_tsv, "benchmark candidate file");
  p_ed->add_option("--corpus", prompt_opts.corpus, "corpus directory with the knowledge table");
  auto* p_app = prompt->add_subcommand("appositive", "appositive generation");
  add_common(p_app);
  p_app->add_option("--input", prompt_opts.input, "JSON lines {id, context, mention}")->required();
  auto* p_qa = prompt->add_subcommand("qa", "few-shot QA with retrieved exemplars");
  add_common(p_qa);
  p_qa->add_option("--questions", prompt_opts.questions, "test questions (JSON lines)")->required();
  p_qa->add_option("--pool", prompt_opts.pool, "exemplar pool (JSON lines)")->required();
  p_qa->add_option("--k", prompt_opts.k, "exemplars per prompt")->capture_default_str();
  auto* p_probe = prompt->add_subcommand("probe", "entity description probing");
  add_common(p_probe);
  p_probe->add_option("--corpus", prompt_opts.corpus, "corpus directory")->required();
  p_probe->add_option("--limit", prompt_opts.limit, "maximum prompts (0 = all)");
  auto* p_lama = prompt->add_subcommand("lama", "cloze probing");
  add_common(p_lama);
  p_lama->add_option("--input", prompt_opts.input, "cloze statements (JSON lines)")->required();
  add_scorer_options(p_lama, prompt_opts.scorer);

  RankOptions rank_opts;
  std::string rank_mode = "perplexity";
  auto* rank = with_config(app.add_subcommand("rank", "score prompts and rank candidates"), hooks);
  rank->add_option("prompts,--prompts", rank_opts.prompts, "prompts.jsonl");
  rank->add_option("-o,--out", rank_opts.out_dir, "output directory")->required();
  rank->add_option("--mode", rank_mode, "perplexity or sum")->capture_default_str();
  rank->add_option("--jobs", rank_opts.scorer.jobs, "worker threads for the built-in scorer")->capture_default_str();
  add_scorer_options(rank, rank_opts.scorer);

  EvalOptions eval_opts;
  auto* eval = with_config(app.add_subcommand("eval", "compute metrics over rank results"), hooks);
  eval->add_option("results,--results", eval_opts.results, "results.jsonl");
  eval->add_option("-o,--out", eval_opts.out_dir, "output directory")->required();
  eval->add_option("--metric", eval_opts.metric, "inkb_f1 | em | f1 | em_f1 | all")->capture_default_str();
  eval->add_option("--stats", eval_opts.stats, "stats.json for minimum-frequency tables");
  eval->add_option("--k", eval_opts.ks, "minimum frequencies for the table");

  StatsOptions stats_opts;
  std::string stats_mode = "primary";
  auto* stats = with_config(app.add_subcommand("stats", "corpus statistics"), hooks);
  stats->add_option("corpus,--corpus", stats_opts.corpus, "corpus directory");
  stats->add_option("-o,--out", stats_opts.out_dir, "output directory")->required();
  stats->add_option("--stride", stats_opts.stride, "slice length in tokens")->capture_default_str();
  stats->add_option("--mode", stats_mode, "primary or upscaling")->capture_default_str();

  TranscriptOptions tr_opts;
  auto* check = app.add_subcommand("check-transcript", "validate a scorer request/response transcript");
  check->add_option("--requests", tr_opts.requests, "requests (JSON lines)")->required();
  check->add_option("--responses", tr_opts.responses, "responses (JSON lines)")->required();
  check->add_option("-o,--out", tr_opts.out_dir, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(kExitUsage, "usage", e.what());
    return kExitUsage;
  }

  fs::path out_dir;
  try {
    for (auto& h : hooks) {
      if (!h.path.empty() && h.sub->parsed()) apply_config(h.sub, h.path);
    }
    CommandResult result;
    if (ingest->parsed()) {
      ingest_opts.mode = ingest::slice_mode_from(ingest_mode);
      if (!skip_regex.empty()) ingest_opts.skip_title_regex = skip_regex;
      out_dir = ingest_opts.out_dir;
      result = cmd_ingest(ingest_opts);
    } else if (compile->parsed()) {
      cc.variant = infill::variant_from(variant);
      cc.mode = ingest::slice_mode_from(compile_mode);
      out_dir = compile_opts.out_dir;
      result = cmd_compile(compile_opts);
    } else if (prompt->parsed()) {
      for (auto* sub : prompt->get_subcommands()) prompt_opts.task = sub->get_name();
      fill_scorer_default(prompt_opts.scorer);
      out_dir = prompt_opts.out_dir;
      result = cmd_prompt(prompt_opts);
    } else if (rank->parsed()) {
      rank_opts.mode = scoring::rank_mode_from(rank_mode);
      fill_scorer_default(rank_opts.scorer);
      out_dir = rank_opts.out_dir;
      result = cmd_rank(rank_opts);
    } else if (eval->parsed()) {
      out_dir = eval_opts.out_dir;
      result = cmd_eval(eval_opts);
    } else if (stats->parsed()) {
      stats_opts.mode = ingest::slice_mode_from(stats_mode);
      out_dir = stats_opts.out_dir;
      result = cmd_stats(stats_opts);
    } else if (check->parsed()) {
      out_dir = tr_opts.out_dir;
      result = cmd_check_transcript(tr_opts);
    }
    write_manifest(out_dir, result.manifest);
    if (result.exit_code != kExitOk) {
      report_error(result.exit_code, result.exit_code == kExitScorer ? "scorer" : "input", result.failure);
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    report_error(kExitUsage, "config", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    report_error(kExitUsage, "config", e.what());
    return kExitUsage;
  } catch (const MissingFileError& e) {
    report_error(kExitMissingFile, "missing_file", e.what());
    return kExitMissingFile;
  } catch (const ScorerError& e) {
    report_error(kExitScorer, "scorer", e.what());
    return kExitScorer;
  } catch (const ProtocolError& e) {
    report_error(kExitScorer, "protocol", e.what());
    return kExitScorer;
  } catch (const Error& e) {
    report_error(kExitBadInput, "input", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    report_error(kExitInternal, "internal", e.what());
    return kExitInternal;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace kilm::cli

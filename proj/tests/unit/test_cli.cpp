#include <gtest/gtest.h>

#include "kilm/cli/app.hpp"
#include "kilm/prompt/prompt.hpp"
#include "kilm/util/jsonl.hpp"
#include "test_support.hpp"

namespace kilm::cli {
namespace {

using test::TempDir;

int kilm(std::vector<std::string> args) { return run(args); }

std::vector<Json> read_records(const std::filesystem::path& p) {
  std::vector<Json> out;
  std::istringstream in(test::read_text(p));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(Json::parse(line));
  }
  return out;
}

prompt::Prompt candidate(std::size_t index, const std::string& title) {
  prompt::Prompt p;
  p.instance_id = "m1#" + std::to_string(index);
  p.group_id = "m1";
  p.task = "ed";
  p.encoder_text = "x <ent> m </ent><ent_desc> <mask> </ent_desc>";
  p.decoder_prefix = "x <ent> m </ent><ent_desc>";
  p.continuation = title;
  p.candidate_index = index;
  p.candidate_title = title;
  p.gold_title = "Long";
  return p;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(kilm({}), 2);
  EXPECT_EQ(kilm({"frobnicate"}), 2);
  TempDir dir;
  EXPECT_EQ(kilm({"compile", dir.path().string(), "-o", (dir / "o").string(), "--variant", "nope"}), 2);
  EXPECT_EQ(kilm({"rank", "p.jsonl", "-o", (dir / "o").string(), "--mode", "max"}), 2);
}

TEST(Cli, MissingFile) {
  TempDir dir;
  EXPECT_EQ(kilm({"ingest", (dir / "absent.xml").string(), "-o", (dir / "c").string()}), 3);
  EXPECT_EQ(kilm({"eval", (dir / "absent.jsonl").string(), "-o", (dir / "e").string()}), 3);
}

TEST(Cli, BadInput) {
  TempDir dir;
  test::write_text(dir / "bad.xml", "<mediawiki><page><title>x</title>");
  EXPECT_EQ(kilm({"ingest", (dir / "bad.xml").string(), "-o", (dir / "c").string()}), 4);
}

TEST(Cli, IngestCompileMatchesGolden) {
  TempDir dir;
  ASSERT_EQ(kilm({"ingest", test::fixture("joker/dump.xml").string(), "-o", (dir / "corpus").string()}), 0);
  ASSERT_EQ(kilm({"compile", (dir / "corpus").string(), "-o", (dir / "train").string(), "--mask-prob", "0"}), 0);
  EXPECT_EQ(test::read_text(dir / "train/train.jsonl"), test::read_text(test::fixture("joker/golden_train.jsonl")));

  auto manifest = read_json_file(dir / "train/run_manifest.json");
  EXPECT_EQ(manifest["command"], "compile");
  EXPECT_EQ(manifest["config"]["mask_prob"], 0.0);
  EXPECT_EQ(manifest["outputs"][0]["path"], "train.jsonl");
  EXPECT_EQ(manifest["outputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_TRUE(std::filesystem::exists(dir / "corpus/run_manifest.json"));
}

TEST(Cli, ConfigFilesFillUnsetOptions) {
  TempDir dir;
  ASSERT_EQ(kilm({"ingest", test::fixture("joker/dump.xml").string(), "-o", (dir / "corpus").string()}), 0);
  test::write_text(dir / "c.toml", "mask_prob = 0.0\nseed = 9\nepochs = 2\n");
  ASSERT_EQ(kilm({"compile", (dir / "corpus").string(), "-o", (dir / "a").string(), "--config",
                  (dir / "c.toml").string(), "--epochs", "1"}),
            0);
  auto m = read_json_file(dir / "a/run_manifest.json");
  EXPECT_EQ(m["config"]["seed"], 9);
  EXPECT_EQ(m["config"]["epochs"], 1);
  EXPECT_EQ(m["config"]["mask_prob"], 0.0);

  test::write_text(dir / "c.json", R"({"variant": "plain", "seed": 4})");
  ASSERT_EQ(kilm({"compile", (dir / "corpus").string(), "-o", (dir / "b").string(), "--config",
                  (dir / "c.json").string()}),
            0);
  m = read_json_file(dir / "b/run_manifest.json");
  EXPECT_EQ(m["config"]["variant"], "plain");
  EXPECT_EQ(m["config"]["seed"], 4);

  test::write_text(dir / "bad.json", R"({"colour": "red"})");
  EXPECT_EQ(kilm({"compile", (dir / "corpus").string(), "-o", (dir / "c").string(), "--config",
                  (dir / "bad.json").string()}),
            2);
}

TEST(Cli, CheckTranscript) {
  TempDir dir;
  const auto req = test::fixture("protocol/golden_requests.jsonl").string();
  EXPECT_EQ(kilm({"check-transcript", "--requests", req, "--responses",
                  test::fixture("protocol/golden_responses.jsonl").string(), "-o", (dir / "ok").string()}),
            0);
  EXPECT_EQ(read_json_file(dir / "ok/transcript_report.json")["ok"], true);
  EXPECT_EQ(kilm({"check-transcript", "--requests", req, "--responses",
                  test::fixture("protocol/bad_responses.jsonl").string(), "-o", (dir / "bad").string()}),
            4);
  EXPECT_EQ(read_json_file(dir / "bad/transcript_report.json")["ok"], false);
}

TEST(Cli, RankModesOnLengthMismatch) {
  TempDir dir;
  prompt::write_prompts(dir / "prompts.jsonl", {candidate(0, "Short"), candidate(1, "Long")});
  test::write_text(dir / "table.json",
                   R"({"Short": [-1.0, -1.0], "Long": [-0.9, -0.9, -0.9, -0.9, -0.9]})");
  const std::string scorer = std::string(KILM_FAKE_SCORER) + " --table " + (dir / "table.json").string();
  for (const std::string mode : {"sum", "perplexity"}) {
    ASSERT_EQ(kilm({"rank", (dir / "prompts.jsonl").string(), "-o", (dir / mode).string(), "--mode", mode,
                    "--scorer", scorer}),
              0);
    auto recs = read_records(dir / mode / "results.jsonl");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0]["predicted_index"], mode == "sum" ? 0 : 1);
    EXPECT_EQ(recs[0]["winner_sum"], 0);
    EXPECT_EQ(recs[0]["winner_perplexity"], 1);
  }
  ASSERT_EQ(kilm({"eval", (dir / "perplexity/results.jsonl").string(), "-o", (dir / "ev").string(), "--metric",
                  "inkb_f1"}),
            0);
  EXPECT_DOUBLE_EQ(read_json_file(dir / "ev/metrics.json")["ed"]["aggregate"]["inkb_f1"].get<double>(), 1.0);
}

TEST(Cli, ScorerFailureExitCode) {
  TempDir dir;
  prompt::write_prompts(dir / "prompts.jsonl", {candidate(0, "Short"), candidate(1, "Long")});
  EXPECT_EQ(kilm({"rank", (dir / "prompts.jsonl").string(), "-o", (dir / "a").string(), "--scorer",
                  std::string(KILM_FAKE_SCORER) + " --crash-after 0"}),
            5);
  EXPECT_EQ(kilm({"rank", (dir / "prompts.jsonl").string(), "-o", (dir / "b").string(), "--scorer",
                  std::string(KILM_FAKE_SCORER) + " --malformed-after 0"}),
            5);
}

TEST(Cli, BuiltinNgramScorer) {
  TempDir dir;
  prompt::write_prompts(dir / "prompts.jsonl", {candidate(0, "Short"), candidate(1, "Long")});
  test::write_text(dir / "corpus.txt", "x Long Long\nx Long\n");
  ASSERT_EQ(kilm({"rank", (dir / "prompts.jsonl").string(), "-o", (dir / "r").string(), "--scorer",
                  "builtin-ngram", "--ngram-corpus", (dir / "corpus.txt").string(), "--ngram-order", "1"}),
            0);
  auto recs = read_records(dir / "r/results.jsonl");
  EXPECT_EQ(recs[0]["predicted_title"], "Long");
  EXPECT_EQ(kilm({"rank", (dir / "prompts.jsonl").string(), "-o", (dir / "m").string(), "--scorer",
                  "builtin-ngram"}),
            2);
}

TEST(Cli, EvalFourInstances) {
  TempDir dir;
  std::string lines;
  const std::vector<std::pair<std::string, std::string>> pairs{{"A", "A"}, {"B", "B"}, {"C", "C"}, {"X", "D"}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Json j{{"instance_id", std::to_string(i)}, {"predicted_title", pairs[i].first},
           {"gold_title", pairs[i].second},    {"in_kb", true},
           {"scored", true}};
    lines += j.dump() + "\n";
  }
  test::write_text(dir / "results.jsonl", lines);
  ASSERT_EQ(kilm({"eval", (dir / "results.jsonl").string(), "-o", (dir / "e").string(), "--metric", "inkb_f1"}), 0);
  EXPECT_DOUBLE_EQ(read_json_file(dir / "e/metrics.json")["ed"]["aggregate"]["inkb_f1"].get<double>(), 0.75);
  EXPECT_EQ(kilm({"eval", (dir / "results.jsonl").string(), "-o", (dir / "g").string(), "--metric", "em"}), 4);
}

TEST(Cli, StatsReportsOverhead) {
  TempDir dir;
  ASSERT_EQ(kilm({"ingest", test::fixture("joker/dump.xml").string(), "-o", (dir / "corpus").string()}), 0);
  ASSERT_EQ(kilm({"stats", (dir / "corpus").string(), "-o", (dir / "s").string()}), 0);
  auto s = read_json_file(dir / "s/stats.json");
  EXPECT_TRUE(s.contains("description_overhead_percent"));
}

}  // namespace
}  // namespace kilm::cli

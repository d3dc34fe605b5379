#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "kilm/error.hpp"
#include "kilm/infill/transforms.hpp"
#include "kilm/prompt/benchmark.hpp"
#include "kilm/prompt/prompt.hpp"
#include "kilm/prompt/structured.hpp"
#include "kilm/prompt/tfidf.hpp"
#include "test_support.hpp"

namespace kilm::prompt {
namespace {

EDInstance wabash() {
  EDInstance inst;
  inst.id = "wabash";
  inst.context = "The Big Blue River is a tributary of the Driftwood White, Wabash, and Ohio rivers.";
  const std::size_t at = inst.context.find("Wabash");
  inst.mention = {"Wabash", at, at + 6};
  inst.candidates = {{"Wabash River", "Tributary of the Ohio River in the United States"},
                     {"Wabash, Indiana", "City in Indiana, United States"},
                     {"Wabash College", "Private liberal arts college in Crawfordsville"}};
  inst.gold_index = 0;
  return inst;
}

TEST(EDPrompt, WabashExample) {
  auto p = build_ed_prompt(wabash(), 0);
  EXPECT_EQ(p.encoder_text,
            "The Big Blue River is a tributary of the Driftwood White, <ent> Wabash </ent><ent_desc> <mask> "
            "</ent_desc>, and Ohio rivers.");
  EXPECT_EQ(p.decoder_prefix,
            "The Big Blue River is a tributary of the Driftwood White, <ent> Wabash </ent><ent_desc>");
  EXPECT_EQ(*p.continuation, "Wabash River <sep> Tributary of the Ohio River in the United States");
  EXPECT_EQ(p.instance_id, "wabash#0");
  EXPECT_EQ(p.group_id, "wabash");
  EXPECT_EQ(*p.gold_title, "Wabash River");
  EXPECT_TRUE(p.is_scoring());
}

TEST(EDPrompt, OnePromptPerCandidateDifferingOnlyInContinuation) {
  auto inst = wabash();
  auto ps = build_ed_prompts(inst);
  ASSERT_EQ(ps.size(), 3u);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(ps[i].encoder_text, ps[0].encoder_text);
    EXPECT_EQ(ps[i].decoder_prefix, ps[0].decoder_prefix);
    EXPECT_EQ(*ps[i].candidate_index, i);
    EXPECT_EQ(*ps[i].candidate_title, inst.candidates[i].title);
  }
  EXPECT_NE(*ps[0].continuation, *ps[1].continuation);
  inst.candidates.resize(1);
  EXPECT_EQ(build_ed_prompts(inst).size(), 1u);
}

TEST(EDPrompt, SharesTheCompilePath) {
  auto inst = wabash();
  ingest::MentionSpan span;
  auto slice = context_slice(inst.context, inst.mention, kDefaultEdWindow, span);
  for (std::size_t i = 0; i < inst.candidates.size(); ++i) {
    const auto& c = inst.candidates[i];
    auto y = infill::kn_infill(slice, span, infill::Knowledge{c.title, c.description});
    auto x = infill::kn_mask(y);
    auto p = build_ed_prompt(inst, i);
    EXPECT_EQ(p.encoder_text, render(x.tokens));
    auto [b, e] = *y.knowledge_block();
    std::span<const Token> yt(y.tokens);
    EXPECT_EQ(*p.continuation, render(yt.subspan(b, e - b)));
    EXPECT_EQ(p.decoder_prefix, render(yt.subspan(0, b)));
  }
}

TEST(EDPrompt, MentionMismatchIsSpanError) {
  auto inst = wabash();
  inst.mention.start += 1;
  inst.mention.end += 1;
  EXPECT_THROW(build_ed_prompt(inst, 0), SpanError);
  inst = wabash();
  inst.mention.text = "Ohio";
  EXPECT_THROW(build_ed_prompt(inst, 0), SpanError);
}

TEST(EDPrompt, WindowIsCenteredAndBounded) {
  std::string context;
  for (int i = 0; i < 500; ++i) context += "w" + std::to_string(i) + " ";
  const std::size_t at = context.find("w250 ");
  ingest::MentionSpan span;
  auto slice = context_slice(context, {"w250", at, at + 4}, 100, span);
  EXPECT_EQ(slice.tokens.size(), 100u);
  EXPECT_EQ(slice.tokens[span.token_start].text, "w250");
  EXPECT_EQ(span.token_start, 49u);
  auto edge = context_slice(context, {"w0", 0, 2}, 100, span);
  EXPECT_EQ(edge.tokens.size(), 100u);
  EXPECT_EQ(span.token_start, 0u);
}

TEST(AppositivePrompt, MagicJohnson) {
  const std::string ctx = "The game was a matchup between Larry Bird and Spartans' point guard Magic Johnson.";
  const std::size_t at = ctx.find("Magic Johnson");
  auto p = build_appositive_prompt("a1", ctx, {"Magic Johnson", at, at + 13});
  EXPECT_EQ(p.encoder_text,
            "The game was a matchup between Larry Bird and Spartans' point guard <ent> Magic Johnson </ent>"
            "<ent_desc> <mask> </ent_desc>.");
  EXPECT_TRUE(p.encoder_text.find("point guard <ent> Magic Johnson </ent><ent_desc> <mask> </ent_desc>.") !=
              std::string::npos);
  EXPECT_EQ(*p.stop_token, "</ent_desc>");
  EXPECT_FALSE(p.is_scoring());
  EXPECT_NO_THROW(p.validate());
}

TEST(AppositivePrompt, SentenceStartAndLocality) {
  const std::string ctx = "Alice met Bob.";
  auto a = build_appositive_prompt("a", ctx, {"Alice", 0, 5});
  EXPECT_EQ(a.encoder_text.rfind("<ent> Alice </ent>", 0), 0u);
  auto b = build_appositive_prompt("b", ctx, {"Bob", 10, 13});
  auto strip = [](std::string s) {
    for (const std::string m : {"<ent> ", " </ent><ent_desc> <mask> </ent_desc>"}) {
      for (auto pos = s.find(m); pos != std::string::npos; pos = s.find(m)) s.erase(pos, m.size());
    }
    return s;
  };
  EXPECT_EQ(strip(a.encoder_text), strip(b.encoder_text));
  EXPECT_NE(a.encoder_text, b.encoder_text);
}

TEST(QAPrompt, BenFranklinFormat) {
  auto p = build_qa_prompt("q", "What did Ben Franklin invent?", {{"What jobs did Ben Franklin do?", {"Diplomat"}}});
  EXPECT_EQ(p.encoder_text,
            "Question: What jobs did Ben Franklin do? Answer: Diplomat\n"
            "Question: What did Ben Franklin invent? Answer: <mask>");
  EXPECT_EQ(p.decoder_prefix,
            "Question: What jobs did Ben Franklin do? Answer: Diplomat\n"
            "Question: What did Ben Franklin invent? Answer:");
  EXPECT_EQ(*p.stop_token, "\n");
}

TEST(QAPrompt, ZeroAndFiveShot) {
  EXPECT_EQ(build_qa_prompt("q", "Who?", {}).encoder_text, "Question: Who? Answer: <mask>");
  std::vector<QAExemplar> five(5, QAExemplar{"Q?", {"A"}});
  auto text = build_qa_prompt("q", "Who?", five).encoder_text;
  std::size_t n = 0;
  for (auto pos = text.find("Question:"); pos != std::string::npos; pos = text.find("Question:", pos + 1)) ++n;
  EXPECT_EQ(n, 6u);
}

ingest::KnowledgeTable joker_table() {
  ingest::KnowledgeTable t;
  t.add("Joker (character)", "Fictional character throughout the DC Universe", ingest::DescriptionSource::Template);
  return t;
}

TEST(DescProbe, JokerExample) {
  auto s = test::make_slice("starring the supervillain the Joker. It ran for nine issues.");
  const std::size_t at = test::token_index(s, "Joker");
  s.mentions = {{at, at + 1, "Joker", "Joker (character)"}};
  auto p = build_desc_probe(s, s.mentions[0], joker_table());
  EXPECT_TRUE(p.decoder_prefix.ends_with("the <ent> Joker </ent><ent_desc>"));
  ASSERT_EQ(p.golds.size(), 1u);
  EXPECT_EQ(p.golds[0], "Joker (character) <sep> Fictional character throughout the DC Universe");
  EXPECT_EQ(*p.stop_token, "</ent_desc>");
}

TEST(DescProbe, MentionAtSliceEndAndMissingEntity) {
  auto s = test::make_slice("the villain Joker", {{2, 3, "Joker", "Joker (character)"}});
  auto p = build_desc_probe(s, s.mentions[0], joker_table());
  EXPECT_TRUE(p.encoder_text.ends_with("<ent_desc> <mask> </ent_desc>"));
  s.mentions[0].entity = "Nobody";
  EXPECT_THROW(build_desc_probe(s, s.mentions[0], joker_table()), MissingKnowledgeError);
}

TEST(LamaPrompt, TeatrWielki) {
  auto count = [](const std::string& s) { return count_words(s); };
  auto p = build_lama_cloze({"l1", "The Teatr Wielki is a <MASK>.", "theatre", "P31"}, count);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->encoder_text, "The Teatr Wielki is a <mask>.");
  EXPECT_EQ(p->decoder_prefix, "The Teatr Wielki is a");
  EXPECT_EQ(*p->max_new_tokens, 1u);
  EXPECT_EQ(p->golds, std::vector<std::string>{"theatre"});
  EXPECT_FALSE(build_lama_cloze({"l2", "X is a [MASK].", "opera house", ""}, count));
  EXPECT_THROW(build_lama_cloze({"l3", "No slot here.", "x", ""}, count), FormatError);
  EXPECT_THROW(build_lama_cloze({"l4", "[MASK] and [MASK].", "x", ""}, count), FormatError);
}

TEST(PromptJson, RoundTripAndValidation) {
  auto ps = build_ed_prompts(wabash());
  ps.push_back(build_qa_prompt("q", "Who?", {}));
  test::TempDir dir;
  write_prompts(dir / "p.jsonl", ps);
  EXPECT_EQ(read_prompts(dir / "p.jsonl"), ps);
  Prompt bad = ps.front();
  bad.stop_token = "\n";
  EXPECT_THROW(bad.validate(), FormatError);
  Prompt none = ps.back();
  none.stop_token.reset();
  none.max_new_tokens.reset();
  EXPECT_THROW(none.validate(), FormatError);
}

TEST(Benchmark, CandidateTsvConversion) {
  auto table = joker_table();
  table.add("Joker (The Dark Knight)", "Fictional character in the 2008 film", ingest::DescriptionSource::Template);
  std::istringstream in(
      "doc1\tdoc1\tJoker\tthe supervillain the\t. It ran\tCANDIDATES\t1,0.9,Joker_(character)\t2,0.1,Joker_(The_Dark_"
      "Knight)\t3,0.05,Unknown_page\tGT:\t0,1,0.9,Joker_(character)\n"
      "doc2\tdoc2\tNobody\tleft\tright\tCANDIDATES\t9,0.5,Unknown_page\tGT:\t-1\n");
  ConvertReport report;
  auto out = convert_candidate_tsv(in, table, report);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(report.lines, 2u);
  EXPECT_EQ(report.no_candidates, 1u);
  EXPECT_EQ(report.candidates_without_description, 2u);
  const auto& inst = out[0];
  EXPECT_EQ(inst.context, "the supervillain the Joker . It ran");
  EXPECT_EQ(inst.context.substr(inst.mention.start, inst.mention.end - inst.mention.start), "Joker");
  ASSERT_EQ(inst.candidates.size(), 2u);
  EXPECT_EQ(*inst.gold_index, 0u);
  EXPECT_TRUE(inst.in_kb);
  auto back = ed_instance_from_json(to_json(inst), "x");
  EXPECT_EQ(back.candidates.size(), 2u);
  EXPECT_EQ(back.mention.start, inst.mention.start);
}

// Brute-force TF-IDF cosine written directly from the definitions.
std::vector<std::size_t> brute_force_top(const std::vector<std::string>& pool, const std::string& query, std::size_t k) {
  auto terms = [](const std::string& s) {
    std::string t;
    for (char c : s) t.push_back(is_ascii_punct(c) ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return split_whitespace(t);
  };
  std::map<std::string, double> df;
  std::vector<std::map<std::string, double>> tf(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (const auto& w : terms(pool[i])) tf[i][w] += 1;
    for (const auto& [w, _] : tf[i]) df[w] += 1;
  }
  const double n = static_cast<double>(pool.size());
  auto weigh = [&](const std::map<std::string, double>& counts) {
    std::map<std::string, double> v;
    for (const auto& [w, c] : counts) {
      if (df.count(w)) v[w] = c * std::log(n / df[w]);
    }
    return v;
  };
  std::map<std::string, double> qcounts;
  for (const auto& w : terms(query)) qcounts[w] += 1;
  auto q = weigh(qcounts);
  double qn = 0;
  for (const auto& [_, x] : q) qn += x * x;
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto d = weigh(tf[i]);
    double dot = 0, dn = 0;
    for (const auto& [w, x] : d) {
      dn += x * x;
      if (q.count(w)) dot += x * q[w];
    }
    const double cos = (qn > 0 && dn > 0) ? dot / std::sqrt(qn * dn) : 0.0;
    scored.push_back({cos, i});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return std::llround(a.first * 1e12) > std::llround(b.first * 1e12);
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

TEST(Tfidf, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> vocab{"who", "what", "river", "city", "founded", "capital", "of", "the", "is",
                                       "largest", "France", "Ohio", "wrote", "novel", "invented", "Franklin"};
  std::vector<std::string> pool;
  for (int i = 0; i < 100; ++i) {
    std::string q;
    const int len = 3 + static_cast<int>(rng() % 6);
    for (int j = 0; j < len; ++j) q += vocab[rng() % vocab.size()] + (j + 1 < len ? " " : "?");
    pool.push_back(q);
  }
  TfidfIndex index(pool);
  for (int t = 0; t < 30; ++t) {
    const std::string query = pool[rng() % pool.size()] + " " + vocab[rng() % vocab.size()];
    auto got = index.query(query, 5);
    std::vector<std::size_t> ids;
    for (const auto& r : got) ids.push_back(r.index);
    EXPECT_EQ(ids, brute_force_top(pool, query, 5)) << query;
  }
}

TEST(Tfidf, SmallPools) {
  TfidfIndex one({"only question"});
  auto r = one.query("question", 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].index, 0u);
  TfidfIndex three({"a b", "b c", "c d"});
  EXPECT_EQ(three.query("c", 10).size(), 3u);
  EXPECT_EQ(tfidf_terms("What's THE river?"), (std::vector<std::string>{"what", "s", "the", "river"}));
}

}  // namespace
}  // namespace kilm::prompt

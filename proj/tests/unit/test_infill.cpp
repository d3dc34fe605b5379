#include <gtest/gtest.h>

#include <map>
#include <set>

#include "kilm/error.hpp"
#include "kilm/infill/compile.hpp"
#include "kilm/infill/sampler.hpp"
#include "kilm/infill/serialize.hpp"
#include "kilm/infill/transforms.hpp"
#include "kilm/ingest/pipeline.hpp"
#include "kilm/ingest/serialize.hpp"
#include "test_support.hpp"

namespace kilm::infill {
namespace {

using ingest::DocumentSlice;
using ingest::MentionSpan;

const std::string kJokerText =
    "The Joker is a comic book series published by DC Comics starring the supervillain the Joker. "
    "It ran for nine issues from May–June 1975 to Sep.–Oct. 1976.";
const Knowledge kJoker{"Joker (character)", "Fictional character throughout the DC Universe"};

DocumentSlice joker_slice() {
  auto s = test::make_slice(kJokerText);
  // the second "Joker", right before the period
  std::size_t at = test::token_index(s, ".") - 1;
  s.mentions = {{at, at + 1, "Joker", "Joker (character)"}};
  return s;
}

ingest::KnowledgeTable joker_table() {
  ingest::KnowledgeTable t;
  t.add(kJoker.title, kJoker.description, ingest::DescriptionSource::Template);
  return t;
}

std::size_t count_label(const TrainingTarget& y, SpanLabel l) {
  std::size_t n = 0;
  for (auto x : y.labels) n += (x == l);
  return n;
}

TEST(KnInfill, JokerExample) {
  auto s = joker_slice();
  auto y = kn_infill(s, s.mentions[0], kJoker);
  EXPECT_EQ(render(y.tokens),
            "The Joker is a comic book series published by DC Comics starring the supervillain the <ent> Joker "
            "</ent><ent_desc> Joker (character) <sep> Fictional character throughout the DC Universe </ent_desc>. "
            "It ran for nine issues from May–June 1975 to Sep.–Oct. 1976.");
  EXPECT_EQ(count_label(y, SpanLabel::Marker), 4u);
  EXPECT_EQ(count_label(y, SpanLabel::Knowledge), knowledge_tokens(kJoker).size());
  ASSERT_TRUE(y.mention_index);
  EXPECT_EQ(y.tokens[*y.mention_index].text, "Joker");
  EXPECT_EQ(strip_to_copy(y), s.tokens);
}

TEST(KnInfill, MissingKnowledge) {
  auto s = joker_slice();
  ingest::KnowledgeTable empty;
  EXPECT_THROW(kn_infill(s, s.mentions[0], empty), MissingKnowledgeError);
  EXPECT_THROW(kn_infill_end(s, s.mentions[0], empty), MissingKnowledgeError);
}

TEST(KnInfill, MentionOutsideSlice) {
  auto s = joker_slice();
  MentionSpan bad{5, 500, "x", "Joker (character)"};
  EXPECT_THROW(kn_infill(s, bad, kJoker), SpanError);
}

TEST(KnInfill, TruncatesSuffixToCap) {
  // 636 slice tokens, mention at 100..102, knowledge block of 20 tokens.
  std::string text;
  for (int i = 0; i < 636; ++i) text += (i ? " t" : "t") + std::to_string(i);
  auto s = test::make_slice(text, {{100, 102, "", "E"}});
  Knowledge k{"Entity title", ""};
  for (int i = 0; i < 17; ++i) k.description += (i ? " d" : "d") + std::to_string(i);
  ASSERT_EQ(knowledge_tokens(k).size(), 20u);

  auto y = kn_infill(s, s.mentions[0], k, 640);
  // Recount: copy tokens kept = 640 - 20 knowledge - 4 markers.
  std::size_t copy = 0, kn = 0, marker = 0;
  for (auto l : y.labels) {
    if (l == SpanLabel::Copy) ++copy;
    if (l == SpanLabel::Knowledge) ++kn;
    if (l == SpanLabel::Marker) ++marker;
  }
  EXPECT_EQ(y.size(), 640u);
  EXPECT_EQ(kn, 20u);
  EXPECT_EQ(marker, 4u);
  EXPECT_EQ(copy, 616u);
  auto block = y.knowledge_block();
  ASSERT_TRUE(block);
  std::vector<Token> kept(y.tokens.begin() + static_cast<std::ptrdiff_t>(block->first),
                          y.tokens.begin() + static_cast<std::ptrdiff_t>(block->second));
  EXPECT_EQ(token_texts(kept), token_texts(knowledge_tokens(k)));
  auto stripped = strip_to_copy(y);
  EXPECT_EQ(stripped, std::vector<Token>(s.tokens.begin(), s.tokens.begin() + 616));
}

TEST(KnInfill, KnowledgeTooLong) {
  auto s = test::make_slice("a b c d e f", {{5, 6, "", "E"}});
  Knowledge k{"T", "one two three four five six seven eight nine ten"};
  EXPECT_THROW(kn_infill(s, s.mentions[0], k, 12), KnowledgeTooLongError);
}

TEST(KnInfillEnd, JokerExample) {
  auto s = joker_slice();
  auto y = kn_infill_end(s, s.mentions[0], kJoker);
  EXPECT_EQ(render(y.tokens),
            "The Joker is a comic book series published by DC Comics starring the supervillain the <ent> Joker "
            "</ent>. It ran for nine issues from May–June 1975 to Sep.–Oct. 1976. </s></s> <ent_desc> Joker "
            "(character) <sep> Fictional character throughout the DC Universe </ent_desc>");
  std::size_t desc_open = 0;
  for (const auto& t : y.tokens) desc_open += (t.text == "<ent_desc>");
  EXPECT_EQ(desc_open, 1u);
  EXPECT_EQ(y.tokens.back().text, "</ent_desc>");
  EXPECT_EQ(strip_to_copy(y), s.tokens);
}

TEST(KnMask, JokerExample) {
  auto s = joker_slice();
  auto x = kn_mask(kn_infill(s, s.mentions[0], kJoker));
  EXPECT_TRUE(x.knowledge_masked);
  EXPECT_EQ(render(x.tokens),
            "The Joker is a comic book series published by DC Comics starring the supervillain the <ent> Joker "
            "</ent><ent_desc> <mask> </ent_desc>. It ran for nine issues from May–June 1975 to Sep.–Oct. 1976.");
}

TEST(KnMask, SingleTokenBlock) {
  TrainingTarget y;
  y.tokens = tokenize_tokens("a <ent> b </ent> <ent_desc> K </ent_desc> c");
  y.labels = {SpanLabel::Copy,   SpanLabel::Marker,    SpanLabel::Copy,   SpanLabel::Marker,
              SpanLabel::Marker, SpanLabel::Knowledge, SpanLabel::Marker, SpanLabel::Copy};
  auto x = kn_mask(y);
  ASSERT_EQ(x.tokens.size(), y.tokens.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_EQ(x.tokens[i].text, i == 5 ? "<mask>" : y.tokens[i].text);
  }
}

TEST(KnMask, PlainIsIdentity) {
  auto y = plain_target(tokenize_tokens("just some text ."));
  auto x = kn_mask(y);
  EXPECT_FALSE(x.knowledge_masked);
  EXPECT_EQ(x.tokens, y.tokens);
}

TEST(KnMask, LocalityOutsideBlock) {
  auto s = joker_slice();
  auto y = kn_infill(s, s.mentions[0], kJoker);
  auto x = kn_mask(y);
  auto [b, e] = *y.knowledge_block();
  for (std::size_t i = 0; i < b; ++i) EXPECT_EQ(x.tokens[i], y.tokens[i]);
  for (std::size_t i = e; i < y.size(); ++i) EXPECT_EQ(x.tokens[i - (e - b) + 1], y.tokens[i]);
}

// Independent replay of the documented infilling procedure: tracks for each
// X position which Y range it stands for, without slot bookkeeping.
struct ReplayItem {
  char kind;  // 'C' copy, 'M' marker, 'K' knowledge mask, 'I' infill mask
  std::size_t y_begin;
  std::size_t y_end;
};

std::vector<ReplayItem> replay(const TrainingTarget& y, std::uint64_t seed, double p, double lambda) {
  std::vector<ReplayItem> items;
  for (std::size_t i = 0; i < y.size();) {
    if (y.labels[i] == SpanLabel::Knowledge) {
      std::size_t e = i;
      while (e < y.size() && y.labels[e] == SpanLabel::Knowledge) ++e;
      items.push_back({'K', i, e});
      i = e;
      continue;
    }
    items.push_back({y.labels[i] == SpanLabel::Copy ? 'C' : 'M', i, i + 1});
    ++i;
  }
  std::size_t copies = 0;
  for (const auto& it : items) copies += (it.kind == 'C');
  const auto budget = static_cast<std::size_t>(std::floor(p * static_cast<double>(copies) + 1e-9));
  Rng rng(seed);
  std::size_t covered = 0;
  while (covered < budget) {
    std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(poisson(rng, lambda)), budget - covered);
    std::vector<std::size_t> candidates;
    if (len == 0) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].kind == 'C') candidates.push_back(i);
      }
      if (candidates.empty()) break;
      const auto at = candidates[uniform_below(rng, candidates.size())];
      items.insert(items.begin() + static_cast<std::ptrdiff_t>(at), {'I', items[at].y_begin, items[at].y_begin});
      continue;
    }
    std::size_t longest = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::size_t run = 0;
      while (i + run < items.size() && items[i + run].kind == 'C') ++run;
      longest = std::max(longest, run);
    }
    if (longest == 0) break;
    len = std::min(len, longest);
    for (std::size_t i = 0; i + len <= items.size(); ++i) {
      bool ok = true;
      for (std::size_t j = i; j < i + len; ++j) ok = ok && items[j].kind == 'C';
      if (ok) candidates.push_back(i);
    }
    const auto at = candidates[uniform_below(rng, candidates.size())];
    ReplayItem merged{'I', items[at].y_begin, items[at + len - 1].y_end};
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(at), items.begin() + static_cast<std::ptrdiff_t>(at + len));
    items.insert(items.begin() + static_cast<std::ptrdiff_t>(at), merged);
    covered += len;
  }
  return items;
}

TrainingTarget hundred_copy_target() {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "w" + std::to_string(i) + " ";
  return plain_target(tokenize_tokens(text));
}

TEST(TextMask, ZeroProbabilityIsIdentity) {
  auto y = hundred_copy_target();
  auto x = corrupt(y, 5, 0.0, 3.0);
  EXPECT_EQ(x.tokens, y.tokens);
  EXPECT_TRUE(x.infill_spans.empty());
}

TEST(TextMask, NoEligibleTokens) {
  TrainingTarget y;
  y.tokens = tokenize_tokens("<ent> </ent> <ent_desc> K K </ent_desc>");
  y.labels = {SpanLabel::Marker, SpanLabel::Marker, SpanLabel::Marker, SpanLabel::Knowledge, SpanLabel::Knowledge,
              SpanLabel::Marker};
  auto x = corrupt(y, 5, 0.5, 3.0);
  EXPECT_EQ(x.tokens, kn_mask(y).tokens);
  EXPECT_TRUE(x.infill_spans.empty());
}

TEST(TextMask, RejectsBadParameters) {
  auto y = hundred_copy_target();
  Rng rng(1);
  EXPECT_THROW(text_mask(kn_mask(y), rng, 1.0, 3.0), std::invalid_argument);
  EXPECT_THROW(text_mask(kn_mask(y), rng, -0.1, 3.0), std::invalid_argument);
  EXPECT_THROW(text_mask(kn_mask(y), rng, 0.3, 0.0), std::invalid_argument);
}

TEST(TextMask, HundredCopyBudgetMatchesReplay) {
  auto y = hundred_copy_target();
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 123456789ull}) {
    auto x = corrupt(y, seed, 0.3, 3.0);
    auto items = replay(y, seed, 0.3, 3.0);
    ASSERT_EQ(items.size(), x.tokens.size()) << seed;
    std::size_t covered = 0;
    std::vector<InfillSpan> spans;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].kind != 'I') continue;
      covered += items[i].y_end - items[i].y_begin;
      spans.push_back({items[i].y_begin, items[i].y_end, i});
    }
    EXPECT_EQ(covered, 30u) << seed;
    EXPECT_EQ(x.infill_spans, spans) << seed;
  }
}

TEST(TextMask, DisciplineAroundMarkersAndKnowledge) {
  auto s = joker_slice();
  auto y = kn_infill(s, s.mentions[0], kJoker);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto x = corrupt(y, seed, 0.3, 3.0);
    auto items = replay(y, seed, 0.3, 3.0);
    ASSERT_EQ(items.size(), x.tokens.size());
    std::size_t covered = 0;
    for (const auto& span : x.infill_spans) {
      for (std::size_t k = span.y_start; k < span.y_end; ++k) ASSERT_EQ(y.labels[k], SpanLabel::Copy);
      covered += span.covered();
    }
    EXPECT_LE(covered, mask_budget(0.3, count_label(y, SpanLabel::Copy)));
    std::size_t kmask = 0;
    for (const auto& slot : x.slots) kmask += (slot.kind == SlotKind::KnowledgeMask);
    EXPECT_EQ(kmask, 1u);
    EXPECT_EQ(derive_slots(y, x.tokens, x.infill_spans, true), x.slots);
  }
}

TEST(LossWeights, ConstructedFixture) {
  TrainingTarget y;
  for (int i = 0; i < 100; ++i) {
    SpanLabel l = SpanLabel::Copy;
    if (i == 40 || i == 42 || i == 43 || i == 64) l = SpanLabel::Marker;
    if (i >= 44 && i < 64) l = SpanLabel::Knowledge;
    y.tokens.push_back({"t" + std::to_string(i), i > 0});
    y.labels.push_back(l);
  }
  CorruptedInput x;
  x.infill_spans = {{2, 6, 2}, {70, 76, 60}};
  auto w = compute_loss_weights(y, x);
  EXPECT_EQ(w.alpha, (Ratio{10, 100}));
  EXPECT_EQ(w.beta, (Ratio{20, 100}));
}

TEST(LossWeights, PlainAndKnowledgeOnly) {
  auto y = hundred_copy_target();
  auto w = compute_loss_weights(y, corrupt(y, 1, 0.0, 3.0));
  EXPECT_EQ(w.alpha.num, 0u);
  EXPECT_EQ(w.beta.num, 0u);

  TrainingTarget k;
  for (const auto& w : split_whitespace("<ent_desc> a b c d </ent_desc>")) k.tokens.push_back({w, true});
  k.labels = {SpanLabel::Marker, SpanLabel::Knowledge, SpanLabel::Knowledge, SpanLabel::Knowledge,
              SpanLabel::Knowledge, SpanLabel::Marker};
  auto kw = compute_loss_weights(k, corrupt(k, 1, 0.3, 3.0));
  EXPECT_EQ(kw.alpha, (Ratio{0, 6}));
  EXPECT_EQ(kw.beta, (Ratio{4, 6}));
}

TEST(Merge, Sentences) {
  EXPECT_EQ(render(merge_transform("Joker (character)", "fictional character throughout the DC Universe")),
            "Joker (character) is fictional character throughout the DC Universe.");
  EXPECT_EQ(render(merge_transform("A", "b.")), "A is b.");
  EXPECT_EQ(render(merge_transform("A", "b")), "A is b.");
  EXPECT_THROW(merge_transform("", "b"), std::invalid_argument);
}

TEST(Sampler, SingleEligibleMention) {
  auto s = joker_slice();
  auto table = joker_table();
  MentionCycle cycle;
  for (int i = 0; i < 3; ++i) {
    Rng rng(i);
    auto m = sample_entity(s, cycle, table, rng);
    ASSERT_TRUE(m);
    EXPECT_EQ(m->entity, "Joker (character)");
  }
}

TEST(Sampler, NoRepeatAcrossEpochs) {
  auto s = test::make_slice("alpha beta gamma", {{0, 1, "", "A"}, {1, 2, "", "B"}, {2, 3, "", "Unknown"}});
  ingest::KnowledgeTable table;
  table.add("A", "first", ingest::DescriptionSource::Template);
  table.add("B", "second", ingest::DescriptionSource::Template);
  EXPECT_EQ(eligible_mentions(s, table), (std::vector<std::size_t>{0, 1}));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EpochSampler sampler;
    Rng rng(seed);
    auto a = sample_entity(s, sampler, table, rng);
    auto b = sample_entity(s, sampler, table, rng);
    ASSERT_TRUE(a && b);
    EXPECT_EQ((std::set<std::string>{a->entity, b->entity}), (std::set<std::string>{"A", "B"}));
  }
}

TEST(Sampler, NoEligibleMention) {
  auto s = test::make_slice("alpha beta", {{0, 1, "", "Unknown"}});
  ingest::KnowledgeTable table;
  MentionCycle cycle;
  Rng rng(1);
  EXPECT_FALSE(sample_entity(s, cycle, table, rng));
}

std::vector<TrainingSample> compile_all(const std::vector<DocumentSlice>& slices, const ingest::KnowledgeTable& table,
                                        const CompileConfig& config, CompileReport* report = nullptr) {
  std::vector<TrainingSample> out;
  auto r = compile_corpus(slices, table, config, [&](const TrainingSample& s) { out.push_back(s); });
  if (report) *report = r;
  return out;
}

TEST(Compile, JokerSingleSample) {
  CompileConfig c;
  c.mask_prob = 0.0;
  auto samples = compile_all({joker_slice()}, joker_table(), c);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(render(samples[0].y.tokens) + "\n", test::read_text(test::fixture("joker/golden_y.txt")));
  EXPECT_EQ(render(samples[0].x.tokens) + "\n", test::read_text(test::fixture("joker/golden_x.txt")));
  EXPECT_EQ(samples[0].weights.alpha.num, 0u);
}

TEST(Compile, TwoEpochsUseDistinctEntities) {
  auto s = test::make_slice("alpha beta gamma", {{0, 1, "", "A"}, {2, 3, "", "B"}});
  ingest::KnowledgeTable table;
  table.add("A", "first letter", ingest::DescriptionSource::Template);
  table.add("B", "second letter", ingest::DescriptionSource::Template);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CompileConfig c;
    c.seed = seed;
    c.epochs = 2;
    auto samples = compile_all({s}, table, c);
    ASSERT_EQ(samples.size(), 2u);
    EXPECT_NE(*samples[0].entity, *samples[1].entity);
    EXPECT_EQ(samples[0].epoch, 0u);
    EXPECT_EQ(samples[1].epoch, 1u);
  }
}

class CompileCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir();
    ingest::IngestOptions o;
    o.dump = test::fixture("synth/synth_dump.xml.bz2");
    o.out_dir = dir_->path();
    o.mode = ingest::SliceMode::Upscaling;
    o.stride = 128;
    ingest::run_ingest(o);
    table_ = new ingest::KnowledgeTable(ingest::read_knowledge_table(dir_->path()));
    slices_ = new std::vector<DocumentSlice>(ingest::read_slices(dir_->path() / ingest::kSlicesFile));
  }
  static void TearDownTestSuite() {
    delete slices_;
    delete table_;
    delete dir_;
  }
  static test::TempDir* dir_;
  static ingest::KnowledgeTable* table_;
  static std::vector<DocumentSlice>* slices_;
};

test::TempDir* CompileCorpus::dir_ = nullptr;
ingest::KnowledgeTable* CompileCorpus::table_ = nullptr;
std::vector<DocumentSlice>* CompileCorpus::slices_ = nullptr;

std::vector<std::string> dump_lines(const std::vector<TrainingSample>& samples) {
  std::vector<std::string> out;
  for (const auto& s : samples) out.push_back(to_json(s).dump());
  return out;
}

TEST_F(CompileCorpus, DeterministicAndJobIndependent) {
  CompileConfig c;
  c.seed = 7;
  c.epochs = 2;
  c.stride = 128;
  auto a = dump_lines(compile_all(*slices_, *table_, c));
  auto b = dump_lines(compile_all(*slices_, *table_, c));
  c.jobs = 8;
  auto d = dump_lines(compile_all(*slices_, *table_, c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  c.seed = 8;
  EXPECT_NE(a, dump_lines(compile_all(*slices_, *table_, c)));
}

TEST_F(CompileCorpus, InvariantsHoldForEverySample) {
  CompileConfig c;
  c.seed = 3;
  c.epochs = 3;
  CompileReport report;
  auto samples = compile_all(*slices_, *table_, c, &report);
  EXPECT_EQ(samples.size(), report.samples);
  EXPECT_EQ(report.samples, report.knowledge_samples + report.plain_samples);
  std::map<std::pair<std::string, std::size_t>, const DocumentSlice*> by_key;
  for (const auto& sl : *slices_) by_key[{sl.doc_id, sl.slice_index}] = &sl;
  for (const auto& s : samples) {
    const auto& slice = *by_key.at({s.doc_id, s.slice_index});
    EXPECT_EQ(token_texts(strip_to_copy(s.y)), token_texts(slice.tokens));
    if (s.entity) {
      EXPECT_LE(s.y.size(), kMaxLenWithKnowledge);
      EXPECT_TRUE(s.x.knowledge_masked);
    }
    for (std::size_t k = 0; k < s.y.size(); ++k) {
      if (s.y.labels[k] == SpanLabel::Copy) {
        EXPECT_FALSE(is_special_token(s.y.tokens[k].text));
      }
    }
    std::uint64_t covered = 0;
    for (const auto& span : s.x.infill_spans) covered += span.covered();
    EXPECT_EQ(s.weights.alpha, (Ratio{covered, s.y.size()}));
    EXPECT_EQ(s.weights.beta, (Ratio{count_label(s.y, SpanLabel::Knowledge), s.y.size()}));
    EXPECT_EQ(corrupt(s.y, s.seed_draw, c.mask_prob, c.poisson_lambda), s.x);
  }
}

TEST_F(CompileCorpus, SerializationRoundTrip) {
  CompileConfig c;
  c.seed = 11;
  auto samples = compile_all(*slices_, *table_, c);
  for (const auto& s : samples) {
    auto j = to_json(s);
    auto back = sample_from_json(Json::parse(j.dump()));
    ASSERT_EQ(back, s);
    EXPECT_EQ(back.x.slots, s.x.slots);
    EXPECT_EQ(j.at("y_labels").get<std::string>(), labels_string(s.y));
  }
}

TEST_F(CompileCorpus, MergeVariant) {
  CompileConfig c;
  c.variant = Variant::Merge;
  c.mask_prob = 0.0;
  CompileReport report;
  auto samples = compile_all(*slices_, *table_, c, &report);
  EXPECT_GT(report.merge_samples, 0u);
  EXPECT_EQ(report.samples, report.merge_samples + report.plain_samples);
  for (const auto& s : samples) {
    if (s.variant != Variant::Merge) continue;
    const auto* e = table_->find(*s.entity);
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(render(s.y.tokens), render(merge_transform(e->entity, e->description)));
    for (const auto& t : s.y.tokens) EXPECT_FALSE(is_special_token(t.text));
  }
}

TEST(Compile, SkipsAndCounts) {
  auto table = joker_table();
  ingest::KnowledgeTable long_table;
  long_table.add("Joker (character)", std::string(2000, 'x') + " " + std::string(10, 'y'),
                 ingest::DescriptionSource::Template);
  CompileConfig c;
  c.max_len_with_knowledge = 10;
  CompileReport report;
  auto samples = compile_all({joker_slice()}, table, c, &report);
  EXPECT_TRUE(samples.empty());
  EXPECT_EQ(report.skip_reasons["knowledge_too_long"], 1u);

  auto bad = test::make_slice("text with sep inside");
  bad.tokens[2].text = "<sep>";
  report = {};
  compile_all({bad}, table, CompileConfig{}, &report);
  EXPECT_EQ(report.skip_reasons["special_token_in_text"], 1u);
}

TEST(Compile, ConfigValidation) {
  CompileConfig c;
  c.mask_prob = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.stride = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(variant_from("bogus"), ConfigError);
}

TEST(Serialize, RejectsInconsistentSample) {
  CompileConfig c;
  auto samples = compile_all({joker_slice()}, joker_table(), c);
  auto j = to_json(samples[0]);
  j["x_tokens"][0] = "Different";
  EXPECT_THROW(sample_from_json(j), FormatError);
}

}  // namespace
}  // namespace kilm::infill

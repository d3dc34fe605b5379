#include <gtest/gtest.h>

#include <random>

#include "kilm/error.hpp"
#include "kilm/special_tokens.hpp"
#include "kilm/tokenizer.hpp"
#include "kilm/util/rng.hpp"
#include "kilm/util/sha256.hpp"

namespace kilm {
namespace {

TEST(Tokenizer, SplitsPunctuationAndKeepsSpacing) {
  auto t = tokenize("the Joker. It ran (1975)");
  std::vector<std::string> texts = token_texts(t.tokens);
  EXPECT_EQ(texts, (std::vector<std::string>{"the", "Joker", ".", "It", "ran", "(", "1975", ")"}));
  EXPECT_FALSE(t.tokens[2].space_before);
  EXPECT_TRUE(t.tokens[3].space_before);
  EXPECT_EQ(render(t.tokens), "the Joker. It ran (1975)");
  EXPECT_EQ(t.offsets[1], (ByteRange{4, 9}));
}

TEST(Tokenizer, MultibyteCharactersStayInWords) {
  auto t = tokenize_tokens("May–June 1975");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].text, "May–June");
}

TEST(Tokenizer, BreaksForceTokenBoundaries) {
  std::vector<std::size_t> breaks{3};
  auto t = tokenize("abcdef", breaks);
  ASSERT_EQ(t.tokens.size(), 2u);
  EXPECT_EQ(t.tokens[0].text, "abc");
  EXPECT_EQ(t.tokens[1].text, "def");
  EXPECT_FALSE(t.tokens[1].space_before);
}

TEST(Tokenizer, RenderCollapsesWhitespace) {
  EXPECT_EQ(render(tokenize_tokens("  a \n\t b  ")), "a b");
}

TEST(Tokenizer, AlignTokensInvertsRender) {
  auto tokens = tokenize_tokens("He said: \"no\", twice.");
  const std::string rendered = render(tokens);
  auto texts = token_texts(tokens);
  auto back = align_tokens(rendered, texts);
  back.front().space_before = tokens.front().space_before;
  EXPECT_EQ(back, tokens);
  std::vector<std::string> wrong{"He", "says"};
  EXPECT_THROW(align_tokens("He said", wrong), FormatError);
}

TEST(Tokenizer, WordHelpers) {
  EXPECT_EQ(count_words(" a  b\tc\n"), 3u);
  EXPECT_EQ(trim("  x y "), "x y");
  EXPECT_EQ(collapse_whitespace(" x \n y "), "x y");
  EXPECT_EQ(to_lower_ascii("ÀBc"), "Àbc");
  EXPECT_EQ(split_whitespace("a b").size(), 2u);
}

TEST(SpecialTokens, SurfacesRoundTrip) {
  for (auto t : kAllSpecialTokens) {
    EXPECT_EQ(special_token_from(surface(t)), t);
    EXPECT_TRUE(is_special_token(surface(t)));
  }
  EXPECT_FALSE(is_special_token("<ent"));
  EXPECT_TRUE(contains_special_surface("x<sep>y"));
  EXPECT_FALSE(contains_special_surface("x < sep > y"));
}

TEST(Rng, UniformBelowStaysInRange) {
  Rng rng(7);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 5000; ++i) ++hist[uniform_below(rng, 5)];
  for (int h : hist) EXPECT_GT(h, 800);
  EXPECT_THROW(uniform_below(rng, 0), std::invalid_argument);
}

TEST(Rng, UniformUnitMatchesTopBits) {
  Rng a(11);
  Rng b(11);
  const double u = uniform_unit(a);
  EXPECT_EQ(u, static_cast<double>(b() >> 11) / 9007199254740992.0);
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(Rng, PoissonMeanIsLambda) {
  Rng rng(3);
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += poisson(rng, 3.0);
  EXPECT_NEAR(sum / n, 3.0, 0.06);
  EXPECT_THROW(poisson(rng, 0.0), std::invalid_argument);
}

TEST(Rng, Mt19937KnownValue) {
  // 10000th output of the default-seeded 64-bit Mersenne Twister.
  std::mt19937_64 g;
  g.discard(9999);
  EXPECT_EQ(g(), 9981545732273789042ULL);
}

TEST(Rng, DeriveSeedSeparatesCoordinates) {
  const auto base = derive_seed(1, "doc", 0, 0, 0);
  EXPECT_EQ(base, derive_seed(1, "doc", 0, 0, 0));
  EXPECT_NE(base, derive_seed(2, "doc", 0, 0, 0));
  EXPECT_NE(base, derive_seed(1, "dod", 0, 0, 0));
  EXPECT_NE(base, derive_seed(1, "doc", 1, 0, 0));
  EXPECT_NE(base, derive_seed(1, "doc", 0, 1, 0));
  EXPECT_NE(base, derive_seed(1, "doc", 0, 0, 1));
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace kilm

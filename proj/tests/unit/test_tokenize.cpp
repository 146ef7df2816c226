#include <gtest/gtest.h>

#include <random>

#include "numclaim/error.hpp"
#include "numclaim/tokenize.hpp"

using namespace numclaim;

namespace {

const DigitMode kR2L{DigitGrouping::R2L, 3};
const DigitMode kL2R{DigitGrouping::L2R, 3};
const DigitMode kNone{DigitGrouping::None, 3};

using Tokens = std::vector<std::string>;

std::string random_text(std::mt19937_64& rng, std::size_t words) {
  static const std::string alphabet = "abcxyz0123456789 .,-$%\t\xC3\xA9";
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t len = 1 + rng() % 12;
    for (std::size_t i = 0; i < len; ++i) out += alphabet[rng() % alphabet.size()];
    out += ' ';
  }
  return out;
}

}  // namespace

TEST(Tokenize, R2LExample) {
  EXPECT_EQ(tokenize("Costs hit 1234567 dollars", kR2L).tokens,
            (Tokens{"costs", "hit", "1", "234", "567", "dollars"}));
}

TEST(Tokenize, L2RExample) {
  EXPECT_EQ(tokenize("Costs hit 1234567 dollars", kL2R).tokens,
            (Tokens{"costs", "hit", "123", "456", "7", "dollars"}));
}

TEST(Tokenize, NoDigitsIsIdentity) {
  EXPECT_EQ(tokenize("no digits here", kR2L).tokens, (Tokens{"no", "digits", "here"}));
}

TEST(Tokenize, NoneKeepsRunsWhole) {
  EXPECT_EQ(tokenize("Costs hit 1234567 dollars", kNone).tokens, (Tokens{"costs", "hit", "1234567", "dollars"}));
}

TEST(Tokenize, PunctuationSplitsNumbers) {
  EXPECT_EQ(tokenize("12.5% of $1,234", kR2L).tokens, (Tokens{"12", "5", "of", "1", "234"}));
}

TEST(Tokenize, DigitRunsInsideWords) {
  EXPECT_EQ(tokenize("COVID19 in 2020s", kR2L).tokens, (Tokens{"covid19", "in", "2", "020", "s"}));
  EXPECT_EQ(tokenize("abc12345", kL2R).tokens, (Tokens{"abc", "123", "45"}));
}

TEST(Tokenize, NonAsciiBytesAreWordCharacters) {
  EXPECT_EQ(tokenize("Caf\xC3\xA9 d\xC3\xA9j\xC3\xA0", kNone).tokens, (Tokens{"caf\xC3\xA9", "d\xC3\xA9j\xC3\xA0"}));
}

TEST(Tokenize, EmptyText) {
  const auto s = tokenize("", kR2L);
  EXPECT_TRUE(s.tokens.empty());
  EXPECT_FALSE(s.truncated);
  EXPECT_TRUE(tokenize("  ,,; ", kL2R).tokens.empty());
}

TEST(Tokenize, GroupSizeIsConfigurable) {
  EXPECT_EQ(tokenize("1234567", DigitMode{DigitGrouping::R2L, 2}).tokens, (Tokens{"1", "23", "45", "67"}));
  EXPECT_EQ(tokenize("12345", DigitMode{DigitGrouping::L2R, 1}).tokens, (Tokens{"1", "2", "3", "4", "5"}));
  EXPECT_THROW(validate(DigitMode{DigitGrouping::R2L, 0}), ConfigError);
  EXPECT_THROW(validate(ContextBudget{0}), ConfigError);
}

TEST(TruncateToBudget, Examples) {
  auto make = [](std::size_t n) {
    TokenStream s;
    for (std::size_t i = 0; i < n; ++i) s.tokens.push_back("t" + std::to_string(i));
    return s;
  };
  const auto long_stream = make(600);
  const auto cut = truncate_to_budget(long_stream, kShortContext);
  EXPECT_EQ(cut.size(), 256u);
  EXPECT_TRUE(cut.truncated);
  EXPECT_TRUE(std::equal(cut.tokens.begin(), cut.tokens.end(), long_stream.tokens.begin()));

  const auto short_cut = truncate_to_budget(make(100), kShortContext);
  EXPECT_EQ(short_cut.size(), 100u);
  EXPECT_FALSE(short_cut.truncated);

  const auto exact = truncate_to_budget(make(256), kShortContext);
  EXPECT_EQ(exact.size(), 256u);
  EXPECT_FALSE(exact.truncated);
}

TEST(CountTokens, Examples) {
  EXPECT_EQ(count_tokens("1234567", kR2L), 3u);
  for (const auto& m : {kR2L, kL2R, kNone}) EXPECT_EQ(count_tokens("", m), 0u);
}

TEST(CountTokens, MatchesTokenizeOnRandomText) {
  std::mt19937_64 rng(3);
  const auto text = random_text(rng, 1000);
  for (const auto& m : {kR2L, kL2R, kNone, DigitMode{DigitGrouping::R2L, 2}})
    EXPECT_EQ(count_tokens(text, m), tokenize(text, m).size());
}

TEST(TokenizeProperties, RandomTexts) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto text = random_text(rng, 1 + rng() % 30);
    const auto r2l = tokenize(text, kR2L);
    const auto l2r = tokenize(text, kL2R);
    EXPECT_EQ(r2l.size(), l2r.size());
    for (const auto& t : r2l.tokens) EXPECT_FALSE(t.empty());
    EXPECT_EQ(tokenize(text, kR2L).tokens, r2l.tokens);
  }
}

TEST(DigitGroupLengths, Shapes) {
  EXPECT_EQ(digit_group_lengths(7, kR2L), (std::vector<std::size_t>{1, 3, 3}));
  EXPECT_EQ(digit_group_lengths(7, kL2R), (std::vector<std::size_t>{3, 3, 1}));
  EXPECT_EQ(digit_group_lengths(6, kR2L), (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(digit_group_lengths(7, kNone), (std::vector<std::size_t>{7}));
  EXPECT_EQ(digit_group_lengths(2, kR2L), (std::vector<std::size_t>{2}));
}

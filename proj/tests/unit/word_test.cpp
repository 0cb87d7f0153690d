#include <gtest/gtest.h>

#include <random>

#include "fpwalk/errors.hpp"
#include "fpwalk/word.hpp"

using namespace fpwalk;

namespace {

Word w(const char* s) { return parse_word(s, 2); }

}  // namespace

TEST(Word, ParseReducesAndFormats) {
  EXPECT_EQ(format_word(w("a1 a1^-1 a2")), "a2");
  EXPECT_EQ(w("a1^3").length(), 3u);
  EXPECT_EQ(w("a1 a2^-2").length(), 3u);
  EXPECT_EQ(format_word(w("a1 a2^-2")), "a1 a2^-2");
  EXPECT_TRUE(w("e").is_identity());
  EXPECT_EQ(format_word(Word()), "e");
  EXPECT_EQ(parse_unreduced_length("a1 a1^-1 a2", 2), 3u);
}

TEST(Word, ParseErrors) {
  EXPECT_THROW(parse_word("b1", 2), ParseError);
  EXPECT_THROW(parse_word("a3", 2), ParseError);
  EXPECT_THROW(parse_word("a1^0", 2), ParseError);
  EXPECT_THROW(parse_word("a1^", 2), ParseError);
  EXPECT_THROW(parse_word("a0", 2), ParseError);
}

TEST(Word, MultiplyInvertHat) {
  EXPECT_TRUE((w("a1") * w("a1^-1")).is_identity());
  EXPECT_EQ(w("a1 a2") * w("a2^-1 a1"), w("a1^2"));
  EXPECT_EQ(Word() * w("a2 a1"), w("a2 a1"));
  EXPECT_EQ(invert(w("a1 a2")), w("a2^-1 a1^-1"));
  EXPECT_EQ(invert(Word()), Word());
  EXPECT_EQ(invert(w("a1^3")), w("a1^-3"));
  EXPECT_EQ(hat(w("a1 a2^-1")), w("a1^-1 a2"));
  EXPECT_EQ(hat(Word()), Word());
  EXPECT_EQ(hat(w("a1^2")), w("a1^-2"));
}

TEST(Word, ShadowMembership) {
  EXPECT_TRUE(in_shadow(w("a1 a2"), w("a1")));
  EXPECT_FALSE(in_shadow(w("a1"), w("a1 a2")));
  EXPECT_FALSE(in_shadow(w("a1^-1 a2"), w("a1")));
  EXPECT_THROW(in_shadow(w("a1"), Word()), PreconditionError);
}

TEST(Word, Endomorphism) {
  std::vector<Word> s{w("a1"), w("a1^-1 a2")};
  EXPECT_EQ(apply_endomorphism(s, w("a1 a2")), w("a2"));
  EXPECT_EQ(apply_endomorphism(s, Word()), Word());
  std::vector<Word> h{w("a1^-1"), w("a2^-1")};
  for (const Word& x : ball(Word(), 4, 2)) EXPECT_EQ(apply_endomorphism(h, x), hat(x));
}

TEST(Word, BallCounts) {
  EXPECT_EQ(ball(Word(), 0, 2).size(), 1u);
  EXPECT_EQ(ball(Word(), 1, 2).size(), 5u);
  EXPECT_EQ(ball(Word(), 2, 2).size(), 17u);
  for (int r = 0; r <= 5; ++r) EXPECT_EQ(ball(Word(), r, 3).size(), ball_size(3, r));
  for (const Word& x : ball(w("a1 a2"), 3, 2)) EXPECT_LE(distance(w("a1 a2"), x), 3u);
}

TEST(Word, ShortlexOrder) {
  EXPECT_LT(Word(), w("a1"));
  EXPECT_LT(w("a1"), w("a1^-1"));
  EXPECT_LT(w("a2^-1"), w("a1 a1"));
}

TEST(Word, ReductionConfluence) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> code(0, 3), len(0, 12);
  for (int t = 0; t < 2000; ++t) {
    std::vector<Letter> seq;
    int n = len(rng);
    for (int i = 0; i < n; ++i) seq.push_back(Letter::from_code(code(rng)));
    Word whole = Word::from_letters(seq);
    // Reduce the two halves first, then multiply.
    std::size_t cut = seq.empty() ? 0 : rng() % (seq.size() + 1);
    Word left = Word::from_letters(std::span(seq).first(cut));
    Word right = Word::from_letters(std::span(seq).subspan(cut));
    EXPECT_EQ(whole, left * right);
    Word acc;
    for (const Letter& l : seq) acc = acc * Word::letter(l);
    EXPECT_EQ(whole, acc);
  }
}

TEST(Word, Associativity) {
  auto all = ball(Word(), 2, 2);
  for (const Word& x : all)
    for (const Word& y : all)
      for (const Word& z : all) ASSERT_EQ((x * y) * z, x * (y * z));
}

TEST(Word, RunStorageOfPowers) {
  Word p = Word::power(2, -1000);
  EXPECT_EQ(p.length(), 1000u);
  EXPECT_EQ(p.runs().size(), 1u);
  EXPECT_TRUE((p * Word::power(2, 1000)).is_identity());
}

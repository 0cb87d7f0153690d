#include <gtest/gtest.h>

#include "shadow_lemmas.hpp"

using namespace fpwalk::testing;

TEST(ShadowLemmas, LastLetterCriterion) {
  LemmaTally t = check_shadow1(4);
  EXPECT_GT(t.cases, 1000u);
  EXPECT_EQ(t.failures, 0u);
}

TEST(ShadowLemmas, InverseInLetterShadow) {
  LemmaTally t = check_shadow2(4);
  EXPECT_GT(t.cases, 1000u);
  EXPECT_EQ(t.failures, 0u);
}

TEST(ShadowLemmas, TranslatedShadow) {
  LemmaTally t = check_shadow3(4);
  EXPECT_GT(t.cases, 1000u);
  EXPECT_EQ(t.failures, 0u);
}

TEST(ShadowLemmas, RankThree) {
  EXPECT_EQ(check_shadow1(3, 3).failures, 0u);
  EXPECT_EQ(check_shadow3(2, 3).failures, 0u);
}

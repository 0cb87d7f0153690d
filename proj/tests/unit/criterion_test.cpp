#include <gtest/gtest.h>

#include "fpwalk/criterion.hpp"
#include "fpwalk/errors.hpp"
#include "fpwalk/presets.hpp"

using namespace fpwalk;

namespace {

std::map<Letter, Interval> uniform(int rank, double rho) {
  std::map<Letter, Interval> m;
  for (Letter l : alphabet(rank)) m[l] = {rho, rho};
  return m;
}

}  // namespace

TEST(Criterion, Term) {
  EXPECT_DOUBLE_EQ(criterion_term(0.0), 0.0);
  EXPECT_DOUBLE_EQ(criterion_term(1.0), 0.5);
  EXPECT_DOUBLE_EQ(criterion_term(1.0 / 3), 0.25);
  EXPECT_THROW(criterion_term(-0.1), PreconditionError);
}

TEST(Criterion, NearestNeighbourIsExactlyOne) {
  CriterionReport r = criterion_sum(uniform(2, 1.0 / 3), 2);
  EXPECT_NEAR(r.total.mid(), 1.0, 1e-15);
  EXPECT_EQ(r.verdict, Verdict::satisfied);
  EXPECT_EQ(r.per_letter.size(), 4u);
}

TEST(Criterion, VerdictThresholds) {
  EXPECT_EQ(criterion_sum(uniform(2, 1e-6), 2).verdict, Verdict::violated);
  EXPECT_EQ(criterion_sum(uniform(3, 0.5), 3).verdict, Verdict::satisfied);
  auto wide = uniform(2, 0.3);
  for (auto& [l, v] : wide) v.upper = 0.4;
  EXPECT_EQ(criterion_sum(wide, 2).verdict, Verdict::inconclusive);
}

TEST(Criterion, MissingOrExtraLetters) {
  auto m = uniform(2, 0.3);
  m.erase(Letter{2, -1});
  EXPECT_THROW(criterion_sum(m, 2), PreconditionError);
  EXPECT_THROW(criterion_sum(uniform(3, 0.3), 2), PreconditionError);
}

TEST(Criterion, CorollaryOnPowersWalk) {
  FirstPassageEngine eng(preset("powers-n2-f2"));
  CorollaryReport r = corollary_pipeline(eng);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.criterion.verdict, Verdict::satisfied);
  EXPECT_NEAR(r.criterion.total.mid(), 1.2873, 1e-3);
  EXPECT_NEAR(r.nu_total, 1.0, 1e-8);
  EXPECT_EQ(r.geodesics.size(), 4u);
  for (const NamedCheck& c : r.checks) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Criterion, CorollaryPreconditions) {
  FirstPassageEngine anti(preset("example-4.1-antisym"));
  EXPECT_THROW(corollary_pipeline(anti), PreconditionError);
}

TEST(Criterion, DisproofOnAntisymmetricExample) {
  FirstPassageEngine eng(preset("example-4.1-antisym"));
  DisproofOptions opts;
  opts.run_mc = false;
  DisproofReport r = disproof_pipeline(eng, opts);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.special_generator, 1);
  EXPECT_EQ(r.criterion.verdict, Verdict::violated);
  EXPECT_NEAR(r.criterion.total.mid(), 0.763932, 1e-5);
  ASSERT_EQ(r.legs.size(), 2u);
  EXPECT_NEAR(r.legs[0].nu_matrix, 0.309016994, 1e-8);
  EXPECT_NEAR(r.legs[1].nu_matrix, 0.190983006, 1e-8);
  EXPECT_TRUE(r.legs[0].expect_strict);
  EXPECT_GT(r.legs[0].margin, 0.2);
  EXPECT_FALSE(r.legs[1].expect_strict);
  EXPECT_NEAR(r.legs[1].margin, 0.0, 1e-6);
}

TEST(Criterion, DisproofPreconditions) {
  FirstPassageEngine ex(preset("example-2.8"));
  DisproofOptions opts;
  opts.run_mc = false;
  EXPECT_THROW(disproof_pipeline(ex, opts), PreconditionError);
}

TEST(Criterion, DisproofDegeneratesToEqualityOnNearestNeighbour) {
  FirstPassageEngine nn(preset("nn-uniform-f2"));
  DisproofOptions opts;
  opts.run_mc = false;
  DisproofReport r = disproof_pipeline(nn, opts);
  EXPECT_TRUE(r.pass);
  for (const LetterLeg& leg : r.legs) {
    EXPECT_FALSE(leg.expect_strict);
    EXPECT_NEAR(leg.margin, 0.0, 1e-8);
  }
  EXPECT_NEAR(r.criterion.total.mid(), 1.0, 1e-8);
}

TEST(Criterion, SymmetricCounterexample) {
  SymmetricCounterexampleReport r = example_symmetric_counterexample();
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.lhs_original, r.lhs_pushed, 1e-8);
  EXPECT_NEAR(r.lhs_pushed, r.lhs_multiplicative, 1e-8);
  EXPECT_NEAR(r.rhs, 0.5, 1e-8);
  EXPECT_NEAR(r.margin, 0.15, 1e-6);
  for (const NamedCheck& c : r.checks) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Criterion, HatPairing) {
  FirstPassageEngine eng(preset("example-4.1-antisym"));
  for (Letter l : alphabet(2)) {
    Word x = Word::letter(l);
    EXPECT_NEAR(eng.first_passage(Word(), x).mid(), eng.first_passage(Word(), hat(x)).mid(), 1e-10);
  }
}

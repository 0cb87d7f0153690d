#include <gtest/gtest.h>

#include "fpwalk/errors.hpp"
#include "fpwalk/monte_carlo.hpp"
#include "fpwalk/presets.hpp"

using namespace fpwalk;

namespace {

Word w(const char* s) { return parse_word(s, 2); }

McOptions small(std::uint64_t samples, std::uint64_t seed = 3) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(MonteCarlo, NearestNeighbourFirstPassage) {
  McEstimate e = estimate_first_passage(preset("nn-uniform-f2"), Word(), w("a1"), {}, small(200'000));
  EXPECT_EQ(e.n_samples, 200'000u);
  EXPECT_GT(e.std_err, 0.0);
  EXPECT_LT(std::abs(e.mean - 1.0 / 3), 4 * e.std_err);
}

TEST(MonteCarlo, CutoffOfOneStep) {
  McOptions o = small(100'000);
  o.cutoff_steps = 1;
  McEstimate e = estimate_first_passage(preset("nn-uniform-f2"), Word(), w("a1"), {}, o);
  EXPECT_LT(std::abs(e.mean - 0.25), 4 * e.std_err);
  EXPECT_GT(e.truncated_fraction, 0.5);
}

TEST(MonteCarlo, BlockingAvoidSet) {
  std::vector<Word> wall{w("a1"), w("a1^2")};
  McEstimate e = estimate_first_passage(preset("powers-n2-f2"), Word(), w("a1^3"), wall, small(50'000));
  EXPECT_EQ(e.mean, 0.0);
  std::vector<Word> bad{w("a1")};
  EXPECT_THROW(estimate_first_passage(preset("nn-uniform-f2"), Word(), w("a1"), bad, small(10)),
               PreconditionError);
  EXPECT_THROW(estimate_first_passage(preset("nn-uniform-f2"), Word(), w("a2"), {}, small(0)), PreconditionError);
}

TEST(MonteCarlo, NearestNeighbourCylinder) {
  CylinderEstimate c = estimate_cylinder(preset("nn-uniform-f2"), w("a1"), 60, small(200'000));
  EXPECT_LT(std::abs(c.at_double.mean - 0.25), 4 * c.at_double.std_err);
  EXPECT_LT(std::abs(c.drift_sigma), 5.0);
  EXPECT_THROW(estimate_cylinder(preset("nn-uniform-f2"), w("a1 a2"), 3, small(10)), PreconditionError);
  EXPECT_THROW(estimate_cylinder(preset("nn-uniform-f2"), Word(), 40, small(10)), PreconditionError);
}

TEST(MonteCarlo, CylindersPartitionTheBoundary) {
  StepMeasure mu = preset("example-4.1-antisym");
  std::vector<Word> roots;
  for (Letter l : alphabet(2)) roots.push_back(Word::letter(l));
  auto est = estimate_cylinders(mu, roots, default_cylinder_threshold(mu, roots), small(100'000));
  double total = 0.0;
  for (const auto& e : est) total += e.at_double.mean;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  StepMeasure mu = preset("example-2.8");
  std::vector<McEstimate> runs;
  for (int t : {1, 4, 8}) {
    McOptions o = small(50'000, 99);
    o.threads = t;
    runs.push_back(estimate_first_passage(mu, Word(), w("a1 a2"), {}, o));
  }
  for (const McEstimate& e : runs) {
    EXPECT_EQ(e.mean, runs[0].mean);
    EXPECT_EQ(e.std_err, runs[0].std_err);
  }
}

TEST(MonteCarlo, SeedChangesStream) {
  StepMeasure mu = preset("nn-uniform-f2");
  McEstimate a = estimate_first_passage(mu, Word(), w("a1"), {}, small(20'000, 1));
  McEstimate b = estimate_first_passage(mu, Word(), w("a1"), {}, small(20'000, 2));
  EXPECT_NE(a.mean, b.mean);
}

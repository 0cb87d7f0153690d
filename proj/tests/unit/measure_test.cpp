#include <gtest/gtest.h>

#include "fpwalk/errors.hpp"
#include "fpwalk/measure.hpp"
#include "fpwalk/presets.hpp"

using namespace fpwalk;

namespace {

const char* kNN = R"({"rank": 2, "measure": [
  {"word": "a1", "prob": 0.25}, {"word": "a1^-1", "prob": 0.25},
  {"word": "a2", "prob": 0.25}, {"word": "a2^-1", "prob": 0.25}]})";

}  // namespace

TEST(Measure, LoadNearestNeighbour) {
  StepMeasure mu = load_measure(kNN);
  EXPECT_EQ(mu.rank(), 2);
  EXPECT_EQ(mu.max_range(), 1);
  EXPECT_DOUBLE_EQ(mu.prob(parse_word("a2^-1", 2)), 0.25);
  EXPECT_DOUBLE_EQ(mu.prob(parse_word("a1 a2", 2)), 0.0);
}

TEST(Measure, LoadErrors) {
  EXPECT_THROW(load_measure(R"({"rank": 2, "measure": [{"word": "a1", "prob": 0.5}, {"word": "a2", "prob": 0.4}]})"),
               ConfigError);
  EXPECT_THROW(load_measure(R"({"rank": 2, "measure": [{"word": "a1 a1^-1 a2", "prob": 1.0}]})"), ConfigError);
  EXPECT_THROW(load_measure(R"({"rank": 2, "measure": [{"word": "a1", "prob": 0.5}, {"word": "a1", "prob": 0.5}]})"),
               ConfigError);
  EXPECT_THROW(load_measure(R"({"rank": 2, "measure": [{"word": "a1", "prob": 1.5}, {"word": "a2", "prob": -0.5}]})"),
               ConfigError);
  EXPECT_THROW(load_measure(R"({"rank": 2, "measure": [{"word": "e", "prob": 1.0}]})"), ConfigError);
  EXPECT_THROW(load_measure("{not json"), ParseError);
  EXPECT_THROW(load_measure(R"({"rank": 2})"), ParseError);
  EXPECT_THROW(load_measure(R"({"rank": 2, "measure": [{"word": "a7", "prob": 1.0}]})"), ParseError);
}

TEST(Measure, RoundTripJson) {
  for (const std::string& name : preset_names()) {
    StepMeasure mu = preset(name);
    StepMeasure back = load_measure(measure_to_json(mu));
    EXPECT_EQ(back.canonical_string(), mu.canonical_string()) << name;
  }
}

TEST(Measure, ClassifyPresets) {
  MeasureClass nn = classify(preset("nn-uniform-f2"), 4);
  EXPECT_TRUE(nn.symmetric && nn.antisymmetric && nn.powers_of_generators);
  EXPECT_EQ(nn.admissible, Admissibility::verified);

  StepMeasure ex = preset("example-2.8");
  EXPECT_EQ(ex.max_range(), 2);
  MeasureClass c = classify(ex, 4);
  EXPECT_TRUE(c.symmetric);
  EXPECT_FALSE(c.powers_of_generators);
  // hat(a b) = a^-1 b^-1 is not in the support, only b^-1 a^-1 is.
  EXPECT_FALSE(c.antisymmetric);
  EXPECT_EQ(c.admissible, Admissibility::verified);

  MeasureClass anti = classify(preset("example-4.1-antisym"), 4);
  EXPECT_TRUE(anti.antisymmetric);
  EXPECT_FALSE(anti.symmetric);

  MeasureClass pw = classify(preset("powers-n2-f2"), default_search_radius(preset("powers-n2-f2")));
  EXPECT_TRUE(pw.symmetric && pw.powers_of_generators);
  EXPECT_EQ(pw.admissible, Admissibility::verified);
}

TEST(Measure, AdmissibilityFailsWhenGeneratorMissing) {
  StepMeasure mu(2, {{Word::power(1, 1), 0.5}, {Word::power(1, -1), 0.5}});
  EXPECT_EQ(classify(mu, 3).admissible, Admissibility::failed);
}

TEST(Measure, AdmissibilityBeyondClosureRadius) {
  // Only powers a^{3k} of a are reachable; the bounded closure cannot rule
  // a out, the exact fallback does.
  StepMeasure mu(2, {{parse_word("a1^3", 2), 0.25},
                     {parse_word("a1^-3", 2), 0.25},
                     {parse_word("a1^-3 a2", 2), 0.25},
                     {parse_word("a2^-1 a1^3", 2), 0.25}});
  MeasureClass c = classify(mu, 4);
  EXPECT_EQ(c.admissible, Admissibility::failed);
  EXPECT_EQ(c.admissibility_method, "cone-reachability");
}

TEST(Measure, ClassifyInvariantUnderRelabeling) {
  StepMeasure mu = preset("example-2.8");
  std::vector<Word> swap{Word::power(2, 1), Word::power(1, 1)};
  StepMeasure nu = pushforward(mu, swap);
  MeasureClass a = classify(mu, 4), b = classify(nu, 4);
  EXPECT_EQ(a.symmetric, b.symmetric);
  EXPECT_EQ(a.antisymmetric, b.antisymmetric);
  EXPECT_EQ(a.powers_of_generators, b.powers_of_generators);
  EXPECT_EQ(a.admissible, b.admissible);
}

TEST(Measure, PushforwardOfSymmetricExample) {
  std::vector<Word> s{Word::power(1, 1), parse_word("a1^-1 a2", 2)};
  StepMeasure nu = pushforward(preset("example-4.2-symmetric"), s);
  EXPECT_EQ(nu.canonical_string(), preset("nn-uniform-f2").canonical_string());
}

TEST(Measure, PresetLookup) {
  EXPECT_EQ(preset_names().size(), 5u);
  EXPECT_FALSE(find_preset("nope").has_value());
  EXPECT_THROW(preset("nope"), ConfigError);
}

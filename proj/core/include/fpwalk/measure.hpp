#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fpwalk/word.hpp"

namespace fpwalk {

struct Step {
  Word word;
  double prob = 0.0;
};

/// Finitely supported probability measure on F_m. Support words are reduced,
/// distinct and nonidentity; probabilities lie in (0, 1] and sum to one.
class StepMeasure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates and stores the steps in shortlex order of their words.
  /// Throws ConfigError on a rule violation.
  StepMeasure(int rank, std::vector<Step> steps);

  int rank() const { return rank_; }
  /// Largest word length in the support (the range n).
  int max_range() const { return max_range_; }
  const std::vector<Step>& steps() const { return steps_; }

  /// mu(w), zero off the support.
  double prob(const Word& w) const;

  /// Canonical text `rank|word:prob|...` with round-trip precision; stable
  /// across runs and used for report digests.
  std::string canonical_string() const;

 private:
  int rank_;
  int max_range_ = 0;
  std::vector<Step> steps_;
};

/// Parses `{ "rank": m, "measure": [ {"word": "...", "prob": p}, ... ] }`.
/// Word text that cancels while parsing counts as non-reduced. No
/// renormalisation is performed.
StepMeasure load_measure(std::string_view json_text);

/// JSON document in the same schema accepted by load_measure.
std::string measure_to_json(const StepMeasure& mu);

/// s_*(mu) for the endomorphism with generator images `images`.
/// Throws ConfigError if an image of a support word collapses to e.
StepMeasure pushforward(const StepMeasure& mu, std::span<const Word> images);

enum class Admissibility { verified, failed, inconclusive };

std::string to_string(Admissibility a);

struct MeasureClass {
  bool symmetric = false;
  bool antisymmetric = false;
  bool powers_of_generators = false;
  Admissibility admissible = Admissibility::inconclusive;
  /// How the admissibility verdict was reached: "closure" when the bounded
  /// semigroup closure saw every letter, "cone-reachability" otherwise.
  std::string admissibility_method;
};

/// 3 * max_range + 3.
int default_search_radius(const StepMeasure& mu);

/// Symmetry flags compare probabilities within StepMeasure::kSumTolerance.
/// Admissibility first runs the semigroup closure inside B(e, search_radius);
/// letters it misses are settled exactly by cone reachability.
MeasureClass classify(const StepMeasure& mu, int search_radius);

}  // namespace fpwalk

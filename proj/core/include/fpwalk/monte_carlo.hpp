#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fpwalk/measure.hpp"
#include "fpwalk/word.hpp"

namespace fpwalk {

struct McEstimate {
  double mean = 0.0;
  /// sqrt(mean (1 - mean) / n_samples). Not called `stderr`, which is a macro.
  double std_err = 0.0;
  std::uint64_t n_samples = 0;
  std::int64_t cutoff_steps = 0;
  std::uint64_t seed = 0;
  /// Paths stopped by the step cutoff before a verdict.
  double truncated_fraction = 0.0;
  /// Paths abandoned beyond the escape margin (first passage only).
  double escaped_fraction = 0.0;
};

struct McOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  /// 0 picks default_threads(). Results do not depend on it.
  int threads = 0;
  std::int64_t cutoff_steps = 10'000;
  /// First passage: a path further than d(x, y) + escape_margin from y is
  /// counted as a miss.
  int escape_margin = 40;
};

/// Fraction of paths from x that visit y before any word of `avoid`. A
/// lower-biased estimate of F(x, y; avoid); truncated_fraction and
/// escaped_fraction bound the bias.
McEstimate estimate_first_passage(const StepMeasure& mu, const Word& x, const Word& y, std::span<const Word> avoid,
                                  const McOptions& opts = {});

struct CylinderEstimate {
  Word root;
  McEstimate at_threshold;
  McEstimate at_double;
  /// |at_double.mean - at_threshold.mean| in units of the combined stderr.
  double drift_sigma = 0.0;
};

/// nu(C(g)) for every g in `roots` from the same sample paths: a path runs
/// until |X_t| >= distance_threshold and counts for g when X_t lies in
/// C_fin(g); it then continues to 2 * distance_threshold for the drift
/// diagnostic. Requires distance_threshold >= |g| + 2 max_range for each g.
std::vector<CylinderEstimate> estimate_cylinders(const StepMeasure& mu, std::span<const Word> roots,
                                                 int distance_threshold, const McOptions& opts = {});

CylinderEstimate estimate_cylinder(const StepMeasure& mu, const Word& root, int distance_threshold,
                                   const McOptions& opts = {});

/// Smallest admissible threshold for `roots`, rounded up to at least 40.
int default_cylinder_threshold(const StepMeasure& mu, std::span<const Word> roots);

}  // namespace fpwalk

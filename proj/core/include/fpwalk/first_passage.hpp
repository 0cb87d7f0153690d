#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fpwalk/measure.hpp"
#include "fpwalk/numeric.hpp"
#include "fpwalk/word.hpp"

namespace fpwalk {

/// Interval estimate of a first-passage probability.
struct FpValue {
  double lower = 0.0;  // certified
  double upper = 1.0;  // heuristic
  int iterations = 0;
  int radius_used = 0;
  bool converged = false;

  double mid() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
  Interval interval() const { return {lower, upper}; }
};

struct FpOptions {
  /// Stop once the extrapolated tail is below tol times the current value.
  double tol = 1e-10;
  /// Extra radius of tree kept explicit around the geodesic hull.
  int core_radius = 0;
  int max_sweeps = 2'000'000;
};

struct KernelStats {
  int iterations = 0;
  double tail = 0.0;
  bool converged = false;
  std::size_t inner_states = 0;
  std::size_t deep_nodes = 0;
};

/// First-passage solver for one step measure.
///
/// For every letter c the walk inside the cone C_fin(c) is summarised by its
/// exit kernel K_c(u, x): the probability that the walk started at u (|u| <= n)
/// first leaves the cone at x (|x| < n). Translates of these kernels replace
/// every branch of the tree that contains no target or avoided word, so each
/// query reduces to a finite chain on the geodesic hull of its words plus
/// one shell of branch states. Kernels and chain values come from monotone
/// iteration from zero and are lower bounds at every step.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class FirstPassageEngine {
 public:
  explicit FirstPassageEngine(const StepMeasure& mu);
  ~FirstPassageEngine();
  FirstPassageEngine(const FirstPassageEngine&);
  FirstPassageEngine& operator=(const FirstPassageEngine&);
  FirstPassageEngine(FirstPassageEngine&&) noexcept;
  FirstPassageEngine& operator=(FirstPassageEngine&&) noexcept;

  const StepMeasure& measure() const;
  const KernelStats& kernel_stats() const;

  /// F(x, y; avoid): probability that the walk from x visits y before any
  /// word of `avoid`. Throws PreconditionError if y is in avoid or tol <= 0.
  FpValue first_passage(const Word& x, const Word& y, std::span<const Word> avoid = {},
                        const FpOptions& opts = {}) const;

  /// F(x -/-> A) = 1 - sum_a F(x, a; A \ {a}).
  FpValue escape_probability(const Word& x, std::span<const Word> A, const FpOptions& opts = {}) const;

  /// F(x -> A_1 -> ... -> A_{r-1} -/-> A_r), expanded recursively with
  /// memoised first-passage values.
  FpValue chained_passage(const Word& x, const std::vector<std::vector<Word>>& chain,
                          const FpOptions& opts = {}) const;

  /// Exact: F(x, y; avoid) > 0.
  bool reachable(const Word& x, const Word& y, std::span<const Word> avoid) const;

  /// Exact: some path from x enters C_fin(g) without visiting `blocked`.
  /// Returns the first word reached inside C_fin(g) on a shortest path of
  /// the reduced chain, or nullopt when the shadow is unreachable.
  std::optional<Word> reaches_shadow(const Word& x, const Word& g, std::span<const Word> blocked,
                                     int core_radius = 0) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// F(x, y; avoid) with a fresh engine.
FpValue first_passage(const StepMeasure& mu, const Word& x, const Word& y, std::span<const Word> avoid = {},
                      double tol = 1e-10);

/// Independent cross-check: value iteration on B(hull, radius) with every
/// state outside treated as failure. Lower bound only; `upper` carries the
/// last sweep's geometric tail and is not a certified bound.
FpValue truncated_first_passage(const StepMeasure& mu, const Word& x, const Word& y, std::span<const Word> avoid,
                                int radius, double sweep_tol = 1e-13);

/// Minimal nonnegative solution of F_s = mu(s) + sum_{t != s} mu(t) F_{t^-1} F_s
/// for a nearest-neighbour measure.
std::map<Letter, double> nn_exact_first_passage(const StepMeasure& mu);

struct RatioSequence {
  Letter direction;
  std::vector<FpValue> values;   // F(e, d^k), k = 1..k_max
  std::vector<Interval> ratios;  // F(e, d^k) / F(e, d^{k-1}), k = 2..k_max
  bool all_converged = true;
};

/// Requires k_max >= 1.
RatioSequence fp_ratio_sequence(const FirstPassageEngine& engine, Letter direction, int k_max,
                                const FpOptions& opts = {});

}  // namespace fpwalk

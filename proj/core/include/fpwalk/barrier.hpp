#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpwalk/first_passage.hpp"
#include "fpwalk/numeric.hpp"
#include "fpwalk/word.hpp"

namespace fpwalk {

enum class BarrierKind { barrier, strong_barrier };

std::string to_string(BarrierKind k);

struct BarrierCertificate {
  std::vector<Word> barrier_set;  // sorted, deduplicated
  Word target;
  BarrierKind kind = BarrierKind::barrier;
  bool verdict = false;
  /// Present iff verdict is false. For a strong barrier whose set leaves the
  /// shadow the path is empty and `reason` says so.
  std::optional<std::vector<Word>> witness;
  std::string reason;
  /// Argument the verdict rests on.
  std::string method;
  int core_radius = 0;
  /// Same verdict after widening the explicit core by max_range.
  bool stable = true;
};

/// B is a g-barrier iff no support path from e reaches C_fin(g) while
/// avoiding B. Decided exactly on the reduced chain of the first-passage
/// engine with the hull of {e, g} and B kept explicit.
BarrierCertificate is_barrier(const FirstPassageEngine& engine, std::span<const Word> B, const Word& g,
                              int core_radius = 0);

/// B is a strong g-barrier iff B lies in C_fin(g) and every support step
/// u -> v with u outside and v inside C_fin(g) lands in B. Such steps have
/// v in B(g, n-1), so the check is a finite scan.
BarrierCertificate is_strong_barrier(const StepMeasure& mu, std::span<const Word> B, const Word& g);

/// Smallest strong g-barrier: all landing points of support steps entering
/// C_fin(g), sorted.
std::vector<Word> minimal_strong_barrier(const StepMeasure& mu, const Word& g);

/// Checks that the witness starts at the tested source, uses support steps,
/// avoids B and ends in C_fin(target).
bool replay_witness(const StepMeasure& mu, const BarrierCertificate& cert);

/// {a_i, ..., a_i^n} for a powers-of-generators walk.
std::vector<Word> canonical_power_barrier(const StepMeasure& mu, int generator);

/// p_k = F(e, d^k; B \ {d^k}) with B = {d, ..., d^n}.
struct PVector {
  Letter direction;
  std::vector<FpValue> values;

  std::vector<double> lower() const;
  std::vector<double> upper() const;
  std::vector<double> mid() const;
};

PVector compute_p_vector(const FirstPassageEngine& engine, Letter direction, const FpOptions& opts = {});
inline PVector compute_p_vector(const FirstPassageEngine& engine, int generator, const FpOptions& opts = {}) {
  return compute_p_vector(engine, Letter{generator, 1}, opts);
}

struct BarrierMatrix {
  std::vector<Word> order;
  std::vector<std::vector<FpValue>> entries;

  Matrix lower() const;
  Matrix upper() const;
  Matrix mid() const;
  double max_width() const;
};

/// (P_B)_{j1 j2} = F(a_i hat(b_j1), b_j2; B \ {b_j2}) in the order of `B`.
/// Requires an antisymmetric walk and a strong a_i-barrier B.
BarrierMatrix compute_P_B(const FirstPassageEngine& engine, int generator, std::span<const Word> B,
                          const FpOptions& opts = {});

/// p_jk = F(d^{j-n}, d^k; B \ {d^k}) for 1 <= j, k <= n.
BarrierMatrix compute_crossing_matrix(const FirstPassageEngine& engine, Letter direction,
                                      const FpOptions& opts = {});

struct Lemma6Row {
  Word b;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
};

struct Lemma6Report {
  std::vector<Lemma6Row> rows;
  double max_residual = 0.0;
  bool pass = false;
};

/// For x outside C_fin(g), a strong g-barrier B and a set B' that cuts x off
/// from C_fin(g): F(x, b; B \ b) = sum_{b' in B' \ (B \ b)} F(x, b'; B' \ b') F(b', b; B \ b).
Lemma6Report lemma6_check(const FirstPassageEngine& engine, const Word& g, std::span<const Word> B,
                          std::span<const Word> B_prime, const Word& x, const FpOptions& opts = {});

}  // namespace fpwalk

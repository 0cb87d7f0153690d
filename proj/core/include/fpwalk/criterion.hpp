#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpwalk/barrier.hpp"
#include "fpwalk/first_passage.hpp"
#include "fpwalk/monte_carlo.hpp"
#include "fpwalk/numeric.hpp"
#include "fpwalk/spectral.hpp"

namespace fpwalk {

enum class Verdict { satisfied, violated, inconclusive };

std::string to_string(Verdict v);

/// ρ/(1+ρ) = 1/(1 + ρ^{-1}), with 0 at ρ = 0.
double criterion_term(double rho);

struct CriterionTerm {
  Letter letter;
  Interval rho;
  Interval term;
  std::string source;  // how ρ was obtained
};

struct CriterionReport {
  std::vector<CriterionTerm> per_letter;  // code order
  Interval total;
  double margin = 0.0;  // total.mid() - 1
  double tol = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// S = sum over the 2m letters of ρ/(1+ρ). Satisfied when S.lower >= 1 - tol,
/// violated when S.upper < 1 - tol, otherwise inconclusive. Needs one entry
/// per letter a_i^{±1}, i = 1..rank.
CriterionReport criterion_sum(const std::map<Letter, Interval>& rhos, int rank, double tol = 1e-9,
                              const std::map<Letter, std::string>& sources = {});

struct NamedCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CorollaryReport {
  CriterionReport criterion;
  std::vector<SpectralReport> geodesics;  // one per letter, code order
  /// ν(C(d)) per letter from the cylinder system, code order.
  std::vector<double> nu;
  double nu_total = 0.0;  // sum over all letters, 1 for a partition
  std::vector<NamedCheck> checks;
  bool pass = false;
};

/// Symmetric powers walks: ρ(d) = λ1(d) from the Perron root of each
/// direction, then ρ/(1+ρ) >= ν(C(d)) per letter and S >= Σ ν = 1.
CorollaryReport corollary_pipeline(const FirstPassageEngine& engine, double tol = 1e-8, const FpOptions& opts = {});

struct DisproofOptions {
  McOptions mc;
  /// 0 picks default_cylinder_threshold.
  int distance_threshold = 0;
  bool run_mc = true;
  double equality_tol = 1e-6;
  FpOptions fp;
};

struct LetterLeg {
  int generator = 0;
  std::vector<Word> strong_barrier;
  /// ν(C(a_j)) from (Id + P_B)^{-1} P_B 1.
  double nu_matrix = 0.0;
  std::optional<CylinderEstimate> nu_mc;
  FpValue f;  // F(e, a_j)
  double nu_ratio = 0.0;  // ν/(1-ν)
  double margin = 0.0;    // nu_ratio - F(e, a_j)
  double tolerance = 0.0;
  bool expect_strict = false;
  bool pass = false;
};

struct DisproofReport {
  int special_generator = 0;  // the i of the structure
  std::vector<BarrierCertificate> structure;
  std::vector<LetterLeg> legs;
  CriterionReport criterion;
  std::vector<NamedCheck> checks;
  bool pass = false;
};

/// Antisymmetric walk with {a_j} an a_j-barrier for j != i and {a_i} an
/// a_i^2-barrier: ρ(a_j) = F(e, a_j) = ν/(1-ν) for j != i and
/// ρ(a_i) = F(e, a_i) <= ν/(1-ν), strict iff {a_i} is no a_i-barrier.
DisproofReport disproof_pipeline(const FirstPassageEngine& engine, const DisproofOptions& opts = {});

struct SymmetricCounterexampleReport {
  /// Steps of s_* mu with s: a -> a, b -> a^{-1} b.
  std::vector<Step> pushed_steps;
  FpValue f_a, f_b;                  // under mu
  FpValue fp_a, fp_b, fp_ainv_b;     // under the pushforward
  std::vector<BarrierCertificate> barriers;
  double lhs_original = 0.0;       // t(F(a)) + t(F(b))
  double lhs_pushed = 0.0;         // t(F'(a)) + t(F'(a^{-1} b))
  double lhs_multiplicative = 0.0; // t(F'(a)) + t(F'(a) F'(b))
  double rhs = 0.0;                // t(F'(a)) + t(F'(b))
  double nu_a = 0.0, nu_b = 0.0;   // ν'(C(a)), ν'(C(b))
  double margin = 0.0;             // rhs - lhs_multiplicative
  std::vector<NamedCheck> checks;
  bool pass = false;
};

SymmetricCounterexampleReport example_symmetric_counterexample(const FpOptions& opts = {});

/// The cylinder identities of the four-step symmetric walk for its five
/// barriers {a, ab}, {b^-1 a^-1} (two roots), {ab}, {b}, {a^-1}, with ν
/// from Monte Carlo.
struct BarrierIdentityReport {
  std::vector<std::string> labels;
  std::vector<PropResidual> residuals;
  std::vector<BarrierCertificate> barriers;
  std::vector<CylinderEstimate> nu;
  bool pass = false;
};

BarrierIdentityReport example_barrier_identities(const FirstPassageEngine& engine, const McOptions& mc,
                                                 const FpOptions& opts = {});

}  // namespace fpwalk

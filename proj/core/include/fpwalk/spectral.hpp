#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fpwalk/barrier.hpp"
#include "fpwalk/cylinder.hpp"
#include "fpwalk/first_passage.hpp"
#include "fpwalk/numeric.hpp"

namespace fpwalk {

/// F_B: first row p, ones on the subdiagonal.
Matrix companion_matrix(std::span<const double> p);

/// Unique positive root of x^n - p_1 x^{n-1} - ... - p_n by bisection on
/// 1 - sum_k p_k x^{-k} over (0, 1 + sum p], to 1e-12. Throws
/// PreconditionError for negative entries or p_n = 0.
double perron_root(std::span<const double> p);

/// Perron root of F_B by power iteration on F_B + Id (shifted so the
/// iteration is aperiodic).
double perron_root_power_iteration(std::span<const double> p, double tol = 1e-14, int max_iter = 1'000'000);

struct CwBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// (min, max) of the first n entries of `window`. Throws if the window holds
/// fewer than n ratios.
CwBounds collatz_wielandt_bounds(std::span<const double> window, int n);

struct Lemma32Report {
  bool hypothesis_met = false;
  /// (1 - nu_i)/(1 - nu_{i+1}) - nu_1/(1 - nu_1), i = 1..n-1.
  std::vector<double> inequality_slack;
  /// Distance of nu_{j+1}/nu_j inside the ratio range of its generating
  /// vectors, j = 1..n-1; negative means outside the cone.
  std::vector<double> cone_slack;
  bool inequality_holds = true;
  bool cone_holds = true;
  bool pass = false;
};

Lemma32Report lemma32_check(const CylinderSolution& nu);

struct RhoEstimate {
  Letter direction;
  int k_max = 0;
  /// F(e, d^k_max)^(1/k_max).
  double kth_root = 0.0;
  /// Last ratio F(e, d^k)/F(e, d^{k-1}) at midpoints, when k_max >= 2.
  double last_ratio = 0.0;
  RatioSequence sequence;
  std::optional<double> lambda1;
  bool agrees_with_lambda1 = false;
};

/// Requires k_max >= max(3, max_range). For powers-of-generators walks also
/// computes lambda1 and flags |last_ratio - lambda1| < threshold.
RhoEstimate rho_estimate(const FirstPassageEngine& engine, Letter direction, int k_max, double threshold = 1e-4,
                         const FpOptions& opts = {});

struct DecompositionReport {
  Letter direction;
  Matrix companion_power;  // F_B^n
  Matrix crossing;         // p_jk from sources d^{j-n}
  Matrix reversed_P_B;     // S P_B, P_B from sources a_i hat(b)
  double residual_crossing = 0.0;
  double residual_P_B = 0.0;
  /// max-entry defect of F_B M_j = M_{j-1}, j = n..2.
  std::vector<double> telescoping;
  double tolerance = 1e-6;
  bool pass = false;
};

/// F_B^n = S P_B on a powers-of-generators walk. F_B comes from the p-vector,
/// the crossing matrix and P_B are computed from their own sources.
DecompositionReport verify_decomposition(const FirstPassageEngine& engine, Letter direction,
                                         const FpOptions& opts = {});

struct SpectralReport {
  Letter direction;
  PVector p;
  double lambda1 = 0.0;
  double lambda1_power = 0.0;
  CwBounds cw;
  int cw_k = 0;
  CylinderSolution cylinders;
  double nu_ratio = 0.0;  // nu_1 / (1 - nu_1)
  double gap = 0.0;       // lambda1 - nu_ratio
  RhoEstimate rho;
  Lemma32Report lemma32;
  DecompositionReport decomposition;
  bool hypothesis_met = false;
  bool inequality_certified = false;
  bool bracket_contains_lambda = false;
};

/// Full one-geodesic pipeline for direction d on a symmetric powers walk.
SpectralReport verify_one_geodesic(const FirstPassageEngine& engine, Letter direction, int k_max = 30,
                                   double tol = 1e-6, const FpOptions& opts = {});

}  // namespace fpwalk

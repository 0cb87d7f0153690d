#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpwalk/barrier.hpp"
#include "fpwalk/first_passage.hpp"
#include "fpwalk/numeric.hpp"

namespace fpwalk {

/// Linear system in nu_k = nu(C(d^k)), k = 1..n:
///   nu_k - sum_{j<k} p_j nu_{k-j} + sum_{j>=k} p_j nu_{j-k+1} = sum_{j>=k} p_j.
struct CylinderSystem {
  Letter direction;
  std::vector<double> p;
  Matrix matrix;
  std::vector<double> rhs;
  std::vector<std::string> labels;
};

CylinderSystem assemble_power_system(std::span<const double> p, Letter direction = {1, 1});
CylinderSystem assemble_power_system(const PVector& p);

struct CylinderSolution {
  Letter direction;
  std::vector<double> p;
  std::vector<double> nu;
  /// 0 < nu_n < ... < nu_1 < 1/2.
  bool ordering_verified = false;
  /// Largest row defect of the cylinder identities evaluated at the solution.
  double residual = 0.0;
};

/// Partial-pivot solve; throws SingularMatrixError.
CylinderSolution solve_cylinders(const CylinderSystem& system);

/// Row defect max_k |nu_k - sum_{j<k} p_j nu_{k-j} - sum_{j>=k} p_j (1 - nu_{j-k+1})|.
double cylinder_residual(std::span<const double> p, std::span<const double> nu);

/// (Id + P)^{-1} P 1, read as (nu(C(b_1^{-1})), ..., nu(C(b_|B|^{-1}))).
std::vector<double> nu_from_matrix_identity(const Matrix& P);

struct PropResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Cylinder roots the identity referenced, in order of use.
  std::vector<Word> referenced;
};

/// Cylinder identity for a barrier B of g and h in C_fin(g):
///   nu(C(x^{-1} h)) = sum_{b in B, b in C_fin(h)} F(x, b; B \ b) (1 - nu(C(b^{-1} h')))
///                   + sum_{b in B, b not in C_fin(h)} F(x, b; B \ b) nu(C(b^{-1} h)),
/// with h' = h minus its last letter. x = e needs a barrier; x outside
/// C_fin(g) needs a strong barrier. `nu` maps cylinder roots to estimates,
/// `nu_stderr` (optional entries) to their standard errors; the tolerance is
/// half the summed interval widths plus 3 combined standard errors.
PropResidual prop_residual_check(const FirstPassageEngine& engine, std::span<const Word> B, const Word& g,
                                 const Word& h, const Word& x, const std::map<Word, double>& nu,
                                 const std::map<Word, double>& nu_stderr = {}, const FpOptions& opts = {});

struct ReturnSeries {
  std::vector<Word> entry_set;
  std::vector<Word> exit_set;
  std::vector<FpValue> terms;         // k = 0..k_max
  std::vector<double> partial_lower;  // running sums of term lower bounds
  FpValue total;
};

/// Truncated return series for nu(C(h)) with S_ent = C_fin(h) n B(h, n) and
/// S_exit = B(h, n) \ C_fin(h). total.lower is a lower bound on nu(C(h)).
ReturnSeries nu_via_returns(const FirstPassageEngine& engine, const Word& h, int k_max, const FpOptions& opts = {});

}  // namespace fpwalk

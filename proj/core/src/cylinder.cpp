#include "fpwalk/cylinder.hpp"

#include <algorithm>
#include <cmath>

#include "fpwalk/errors.hpp"

namespace fpwalk {

CylinderSystem assemble_power_system(std::span<const double> p, Letter direction) {
  const std::size_t n = p.size();
  if (n == 0) throw PreconditionError("empty p-vector");
  CylinderSystem sys;
  sys.direction = direction;
  sys.p.assign(p.begin(), p.end());
  sys.matrix = Matrix(n, n);
  sys.rhs.assign(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    sys.matrix(k - 1, k - 1) += 1.0;
    for (std::size_t j = 1; j < k; ++j) sys.matrix(k - 1, k - j - 1) -= p[j - 1];
    for (std::size_t j = k; j <= n; ++j) {
      sys.matrix(k - 1, j - k) += p[j - 1];
      sys.rhs[k - 1] += p[j - 1];
    }
    sys.labels.push_back("nu(C(" + format_word(Word::power(direction.generator, direction.sign * static_cast<int>(k))) +
                         "))");
  }
  return sys;
}

CylinderSystem assemble_power_system(const PVector& p) {
  std::vector<double> mid = p.mid();
  return assemble_power_system(mid, p.direction);
}

double cylinder_residual(std::span<const double> p, std::span<const double> nu) {
  const std::size_t n = p.size();
  if (nu.size() != n) throw PreconditionError("p and nu sizes differ");
  double worst = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double rhs = 0.0;
    for (std::size_t j = 1; j < k; ++j) rhs += p[j - 1] * nu[k - j - 1];
    for (std::size_t j = k; j <= n; ++j) rhs += p[j - 1] * (1.0 - nu[j - k]);
    worst = std::max(worst, std::abs(nu[k - 1] - rhs));
  }
  return worst;
}

CylinderSolution solve_cylinders(const CylinderSystem& system) {
  CylinderSolution sol;
  sol.direction = system.direction;
  sol.p = system.p;
  sol.nu = solve_linear(system.matrix, system.rhs);
  sol.residual = cylinder_residual(sol.p, sol.nu);
  const std::size_t n = sol.nu.size();
  bool ok = sol.nu[n - 1] > 0.0 && sol.nu[0] < 0.5;
  for (std::size_t k = 0; k + 1 < n; ++k) ok = ok && sol.nu[k] > sol.nu[k + 1];
  sol.ordering_verified = ok;
  return sol;
}

std::vector<double> nu_from_matrix_identity(const Matrix& P) {
  const std::size_t n = P.rows();
  if (P.cols() != n) throw PreconditionError("P_B must be square");
  std::vector<double> ones(n, 1.0);
  return solve_linear(Matrix::identity(n) + P, P * ones);
}

namespace {

std::vector<Word> without(std::span<const Word> set, const Word& w) {
  std::vector<Word> out;
  for (const Word& x : set)
    if (!(x == w)) out.push_back(x);
  return out;
}

}  // namespace

PropResidual prop_residual_check(const FirstPassageEngine& engine, std::span<const Word> B, const Word& g,
                                 const Word& h, const Word& x, const std::map<Word, double>& nu,
                                 const std::map<Word, double>& nu_stderr, const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  if (!in_shadow(h, g)) throw PreconditionError("h must lie in C_fin(g)");
  if (x.is_identity()) {
    BarrierCertificate c = is_barrier(engine, B, g);
    if (!c.verdict) throw PreconditionError("B is not a g-barrier");
  } else {
    if (in_shadow(x, g)) throw PreconditionError("x must lie outside C_fin(g)");
    BarrierCertificate c = is_strong_barrier(mu, B, g);
    if (!c.verdict) throw PreconditionError("B is not a strong g-barrier: " + c.reason);
  }
  PropResidual out;
  auto lookup = [&](const Word& w) {
    out.referenced.push_back(w);
    if (w.is_identity()) return std::pair{1.0, 0.0};
    auto it = nu.find(w);
    if (it == nu.end()) throw PreconditionError("missing cylinder estimate for " + format_word(w));
    auto se = nu_stderr.find(w);
    return std::pair{it->second, se == nu_stderr.end() ? 0.0 : se->second};
  };
  auto [lhs, lhs_se] = lookup(invert(x) * h);
  double var = lhs_se * lhs_se;
  double rhs_lo = 0.0, rhs_hi = 0.0;
  const Word h_short = h.prefix(h.length() - 1);
  for (const Word& b : B) {
    FpValue f = engine.first_passage(x, b, without(B, b), opts);
    double coef, se;
    if (in_shadow(b, h)) {
      auto [v, s] = lookup(invert(b) * h_short);
      coef = 1.0 - v;
      se = s;
    } else {
      auto [v, s] = lookup(invert(b) * h);
      coef = v;
      se = s;
    }
    rhs_lo += f.lower * coef;
    rhs_hi += f.upper * coef;
    var += (f.mid() * se) * (f.mid() * se);
  }
  out.lhs = lhs;
  out.rhs = 0.5 * (rhs_lo + rhs_hi);
  out.residual = std::abs(out.lhs - out.rhs);
  out.tolerance = 0.5 * std::abs(rhs_hi - rhs_lo) + 3.0 * std::sqrt(var) + 1e-12;
  out.pass = out.residual <= out.tolerance;
  return out;
}

ReturnSeries nu_via_returns(const FirstPassageEngine& engine, const Word& h, int k_max, const FpOptions& opts) {
  if (k_max < 0) throw PreconditionError("k_max must be nonnegative");
  if (h.is_identity()) throw PreconditionError("cylinder root must not be the identity");
  const StepMeasure& mu = engine.measure();
  ReturnSeries out;
  for_each_in_ball(h, mu.max_range(), mu.rank(), [&](const Word& w) {
    (in_shadow(w, h) ? out.entry_set : out.exit_set).push_back(w);
    return true;
  });
  std::sort(out.entry_set.begin(), out.entry_set.end());
  std::sort(out.exit_set.begin(), out.exit_set.end());
  out.total.lower = out.total.upper = 0.0;
  out.total.converged = true;
  out.total.radius_used = opts.core_radius;
  std::vector<std::vector<Word>> chain{out.entry_set};
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      chain.push_back(out.exit_set);
      chain.push_back(out.entry_set);
    }
    std::vector<std::vector<Word>> full = chain;
    full.push_back(out.exit_set);
    FpValue term = engine.chained_passage(Word(), full, opts);
    out.terms.push_back(term);
    out.total.lower += term.lower;
    out.total.upper += term.upper;
    out.total.iterations += term.iterations;
    out.total.converged = out.total.converged && term.converged;
    out.partial_lower.push_back(out.total.lower);
  }
  out.total.upper = std::min(out.total.upper, 1.0);
  return out;
}

}  // namespace fpwalk

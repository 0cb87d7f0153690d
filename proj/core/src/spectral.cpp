#include "fpwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpwalk/errors.hpp"

namespace fpwalk {

namespace {

bool powers_support(const StepMeasure& mu) {
  return std::all_of(mu.steps().begin(), mu.steps().end(), [](const Step& s) { return s.word.is_power(); });
}

}  // namespace

Matrix companion_matrix(std::span<const double> p) {
  const std::size_t n = p.size();
  if (n == 0) throw PreconditionError("empty p-vector");
  Matrix f(n, n);
  for (std::size_t k = 0; k < n; ++k) f(0, k) = p[k];
  for (std::size_t r = 1; r < n; ++r) f(r, r - 1) = 1.0;
  return f;
}

double perron_root(std::span<const double> p) {
  if (p.empty()) throw PreconditionError("empty p-vector");
  for (double v : p)
    if (v < 0.0 || !std::isfinite(v)) throw PreconditionError("p-vector entries must be nonnegative");
  if (!(p.back() > 0.0)) throw PreconditionError("p_n = 0: companion matrix is reducible");
  auto f = [&](double x) {
    double s = 0.0, xk = 1.0;
    for (double pk : p) {
      xk /= x;
      s += pk * xk;
    }
    return 1.0 - s;
  };
  double lo = 0.0;
  double hi = 1.0 + std::accumulate(p.begin(), p.end(), 0.0);
  while (hi - lo > 1e-15 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double perron_root_power_iteration(std::span<const double> p, double tol, int max_iter) {
  Matrix a = companion_matrix(p) + Matrix::identity(p.size());
  std::vector<double> v(p.size(), 1.0);
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> w = a * v;
    double norm = *std::max_element(w.begin(), w.end());
    double prev = est;
    est = norm / *std::max_element(v.begin(), v.end());
    for (double& x : w) x /= norm;
    v = std::move(w);
    if (it > 10 && std::abs(est - prev) < tol) break;
  }
  return est - 1.0;
}

CwBounds collatz_wielandt_bounds(std::span<const double> window, int n) {
  if (n < 1 || window.size() < static_cast<std::size_t>(n)) {
    throw PreconditionError("Collatz-Wielandt window needs at least n ratios");
  }
  auto [lo, hi] = std::minmax_element(window.begin(), window.begin() + n);
  return {*lo, *hi};
}

Lemma32Report lemma32_check(const CylinderSolution& sol) {
  Lemma32Report rep;
  const std::vector<double>& nu = sol.nu;
  const std::vector<double>& p = sol.p;
  const std::size_t n = nu.size();
  rep.hypothesis_met = sol.ordering_verified;
  constexpr double kSlack = 1e-12;
  const double lead = nu[0] / (1.0 - nu[0]);
  for (std::size_t i = 1; i < n; ++i) {
    double s = (1.0 - nu[i - 1]) / (1.0 - nu[i]) - lead;
    rep.inequality_slack.push_back(s);
    rep.inequality_holds = rep.inequality_holds && s >= -kSlack;
  }
  // Row k of the system writes nu_k as sum_l p_l c(k, l).
  auto coef = [&](std::size_t k, std::size_t l) { return l < k ? nu[k - l - 1] : 1.0 - nu[l - k]; };
  for (std::size_t j = 1; j < n; ++j) {
    double rmin = INFINITY, rmax = -INFINITY;
    for (std::size_t l = 1; l <= n; ++l) {
      if (!(p[l - 1] > 0.0)) continue;
      double r = coef(j + 1, l) / coef(j, l);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    double r = nu[j] / nu[j - 1];
    double s = std::min(r - rmin, rmax - r);
    rep.cone_slack.push_back(s);
    rep.cone_holds = rep.cone_holds && s >= -kSlack;
  }
  rep.pass = rep.hypothesis_met && rep.inequality_holds && rep.cone_holds;
  return rep;
}

RhoEstimate rho_estimate(const FirstPassageEngine& engine, Letter direction, int k_max, double threshold,
                         const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  if (k_max < std::max(3, mu.max_range())) {
    throw PreconditionError("k_max must be at least max(3, range)");
  }
  RhoEstimate out;
  out.direction = direction;
  out.k_max = k_max;
  out.sequence = fp_ratio_sequence(engine, direction, k_max, opts);
  out.kth_root = std::pow(out.sequence.values.back().mid(), 1.0 / k_max);
  out.last_ratio = out.sequence.ratios.back().mid();
  if (powers_support(mu)) {
    PVector p = compute_p_vector(engine, direction, opts);
    std::vector<double> mid = p.mid();
    if (mid.back() > 0.0) {
      out.lambda1 = perron_root(mid);
      out.agrees_with_lambda1 = std::abs(out.last_ratio - *out.lambda1) < threshold;
    }
  }
  return out;
}

DecompositionReport verify_decomposition(const FirstPassageEngine& engine, Letter direction, const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  if (!powers_support(mu)) throw PreconditionError("decomposition needs a powers-of-generators walk");
  const std::size_t n = static_cast<std::size_t>(mu.max_range());
  DecompositionReport rep;
  rep.direction = direction;
  PVector p = compute_p_vector(engine, direction, opts);
  Matrix fb = companion_matrix(p.mid());
  rep.companion_power = matrix_power(fb, static_cast<int>(n));
  BarrierMatrix crossing = compute_crossing_matrix(engine, direction, opts);
  rep.crossing = crossing.mid();
  rep.residual_crossing = max_abs_diff(rep.companion_power, rep.crossing);

  // P_B lives on the positive powers. The inverse direction reuses it only
  // when hat fixes the measure.
  if (direction.sign < 0) {
    for (const Step& s : mu.steps())
      if (mu.prob(hat(s.word)) != s.prob) throw PreconditionError("inverse direction needs a hat-invariant walk");
  }
  std::vector<Word> B;
  for (std::size_t k = 1; k <= n; ++k) B.push_back(Word::power(direction.generator, static_cast<int>(k)));
  BarrierMatrix pb = compute_P_B(engine, direction.generator, B, opts);
  Matrix pbm = pb.mid();
  rep.reversed_P_B = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) rep.reversed_P_B(r, c) = pbm(n - 1 - r, c);
  rep.residual_P_B = max_abs_diff(rep.companion_power, rep.reversed_P_B);

  auto m_of = [&](std::size_t j) {
    Matrix m(n, n);
    std::size_t row = 0;
    for (std::size_t src = j; src <= n; ++src, ++row)
      for (std::size_t c = 0; c < n; ++c) m(row, c) = rep.crossing(src - 1, c);
    for (std::size_t e = 0; row < n; ++row, ++e) m(row, e) = 1.0;
    return m;
  };
  for (std::size_t j = n; j >= 2; --j) rep.telescoping.push_back(max_abs_diff(fb * m_of(j), m_of(j - 1)));
  double worst = std::max(rep.residual_crossing, rep.residual_P_B);
  for (double t : rep.telescoping) worst = std::max(worst, t);
  rep.pass = worst < rep.tolerance;
  return rep;
}

SpectralReport verify_one_geodesic(const FirstPassageEngine& engine, Letter direction, int k_max, double tol,
                                   const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  MeasureClass cls = classify(mu, mu.max_range());
  if (!cls.symmetric || !cls.powers_of_generators) {
    throw PreconditionError("one-geodesic pipeline needs a symmetric powers-of-generators walk");
  }
  SpectralReport rep;
  rep.direction = direction;
  rep.p = compute_p_vector(engine, direction, opts);
  std::vector<double> p = rep.p.mid();
  rep.lambda1 = perron_root(p);
  rep.lambda1_power = perron_root_power_iteration(p);
  rep.cylinders = solve_cylinders(assemble_power_system(rep.p));
  rep.hypothesis_met = rep.cylinders.ordering_verified;
  rep.nu_ratio = rep.cylinders.nu[0] / (1.0 - rep.cylinders.nu[0]);
  rep.gap = rep.lambda1 - rep.nu_ratio;
  rep.inequality_certified = rep.hypothesis_met && rep.gap >= -tol;
  rep.rho = rho_estimate(engine, direction, k_max, 1e-4, opts);

  const int n = mu.max_range();
  std::vector<double> window;
  for (int k = k_max; k > k_max - n; --k) window.push_back(rep.rho.sequence.ratios[static_cast<std::size_t>(k - 2)].mid());
  rep.cw = collatz_wielandt_bounds(window, n);
  rep.cw_k = k_max;
  constexpr double kContainSlack = 1e-9;
  rep.bracket_contains_lambda =
      rep.cw.lower - kContainSlack <= rep.lambda1 && rep.lambda1 <= rep.cw.upper + kContainSlack;
  rep.lemma32 = lemma32_check(rep.cylinders);
  rep.decomposition = verify_decomposition(engine, direction, opts);
  return rep;
}

}  // namespace fpwalk

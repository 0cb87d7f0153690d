#include "fpwalk/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "fpwalk/cylinder.hpp"
#include "fpwalk/errors.hpp"
#include "fpwalk/presets.hpp"

namespace fpwalk {

namespace {

NamedCheck check_close(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, expected, tol, std::abs(value - expected) <= tol};
}

NamedCheck check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, ok}; }

bool all_pass(const std::vector<NamedCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const NamedCheck& c) { return c.pass; });
}

Word gen(int i, int e = 1) { return Word::power(i, e); }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied:
      return "satisfied";
    case Verdict::violated:
      return "violated";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double criterion_term(double rho) {
  if (rho < 0.0) throw PreconditionError("rho must be nonnegative");
  return rho / (1.0 + rho);
}

CriterionReport criterion_sum(const std::map<Letter, Interval>& rhos, int rank, double tol,
                              const std::map<Letter, std::string>& sources) {
  CriterionReport rep;
  rep.tol = tol;
  rep.total.lower = rep.total.upper = 0.0;
  for (const Letter& l : alphabet(rank)) {
    auto it = rhos.find(l);
    if (it == rhos.end()) throw PreconditionError("missing rho for " + format_word(Word::letter(l)));
    CriterionTerm t;
    t.letter = l;
    t.rho = it->second;
    t.term.lower = criterion_term(t.rho.lower);
    t.term.upper = criterion_term(t.rho.upper);
    auto src = sources.find(l);
    if (src != sources.end()) t.source = src->second;
    rep.total.lower += t.term.lower;
    rep.total.upper += t.term.upper;
    rep.per_letter.push_back(std::move(t));
  }
  if (rhos.size() != rep.per_letter.size()) throw PreconditionError("rho given for a letter outside the alphabet");
  rep.margin = rep.total.mid() - 1.0;
  if (rep.total.lower >= 1.0 - tol) {
    rep.verdict = Verdict::satisfied;
  } else if (rep.total.upper < 1.0 - tol) {
    rep.verdict = Verdict::violated;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

CorollaryReport corollary_pipeline(const FirstPassageEngine& engine, double tol, const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  MeasureClass cls = classify(mu, mu.max_range());
  if (!cls.symmetric || !cls.powers_of_generators) {
    throw PreconditionError("corollary pipeline needs a symmetric powers-of-generators walk");
  }
  CorollaryReport rep;
  std::map<Letter, Interval> rhos;
  std::map<Letter, std::string> sources;
  for (const Letter& l : alphabet(mu.rank())) {
    SpectralReport s = verify_one_geodesic(engine, l, 30, 1e-6, opts);
    // λ1 increases in every p_k, so the p-vector bounds bracket it.
    Interval rho{perron_root(s.p.lower()), perron_root(s.p.upper())};
    rhos[l] = rho;
    sources[l] = "perron-root";
    const double nu = s.cylinders.nu[0];
    rep.nu.push_back(nu);
    rep.nu_total += nu;
    const std::string name = format_word(Word::letter(l));
    rep.checks.push_back(check_true("ordering hypothesis " + name, s.hypothesis_met));
    rep.checks.push_back({"rho/(1+rho) >= nu(C(" + name + "))", criterion_term(rho.lower), nu, tol,
                          criterion_term(rho.lower) >= nu - tol});
    rep.geodesics.push_back(std::move(s));
  }
  rep.criterion = criterion_sum(rhos, mu.rank(), tol, sources);
  rep.checks.push_back(check_close("sum of letter cylinders", rep.nu_total, 1.0, tol));
  rep.checks.push_back({"S >= 1", rep.criterion.total.lower, 1.0, tol, rep.criterion.verdict == Verdict::satisfied});
  rep.pass = all_pass(rep.checks);
  return rep;
}

DisproofReport disproof_pipeline(const FirstPassageEngine& engine, const DisproofOptions& opts) {
  const StepMeasure& mu = engine.measure();
  MeasureClass cls = classify(mu, mu.max_range());
  if (!cls.antisymmetric) throw PreconditionError("disproof pipeline needs an antisymmetric walk");
  const int m = mu.rank();

  std::vector<bool> self(m + 1), square(m + 1);
  std::vector<BarrierCertificate> self_cert(m + 1), square_cert(m + 1);
  for (int j = 1; j <= m; ++j) {
    const Word a = gen(j);
    self_cert[j] = is_barrier(engine, std::span<const Word>(&a, 1), a);
    square_cert[j] = is_barrier(engine, std::span<const Word>(&a, 1), gen(j, 2));
    self[j] = self_cert[j].verdict;
    square[j] = square_cert[j].verdict;
  }
  int special = 0;
  for (int i = 1; i <= m && special == 0; ++i) {
    bool ok = square[i];
    for (int j = 1; j <= m; ++j)
      if (j != i) ok = ok && self[j];
    if (ok && !self[i]) special = i;
  }
  if (special == 0) {
    for (int i = 1; i <= m && special == 0; ++i) {
      bool ok = square[i];
      for (int j = 1; j <= m; ++j)
        if (j != i) ok = ok && self[j];
      if (ok) special = i;
    }
  }
  if (special == 0) throw PreconditionError("singleton barrier structure not met");

  DisproofReport rep;
  rep.special_generator = special;
  for (int j = 1; j <= m; ++j) rep.structure.push_back(j == special ? square_cert[j] : self_cert[j]);
  if (!self[special]) rep.structure.push_back(self_cert[special]);

  std::vector<Word> roots;
  for (int j = 1; j <= m; ++j) roots.push_back(gen(j));
  std::vector<CylinderEstimate> mc;
  if (opts.run_mc) {
    int threshold = opts.distance_threshold > 0 ? opts.distance_threshold : default_cylinder_threshold(mu, roots);
    mc = estimate_cylinders(mu, roots, threshold, opts.mc);
  }

  std::map<Letter, Interval> rhos;
  std::map<Letter, std::string> sources;
  for (int j = 1; j <= m; ++j) {
    LetterLeg leg;
    leg.generator = j;
    leg.strong_barrier = minimal_strong_barrier(mu, gen(j));
    BarrierMatrix pb = compute_P_B(engine, j, leg.strong_barrier, opts.fp);
    std::vector<double> nu = nu_from_matrix_identity(pb.mid());
    auto pos = std::find(pb.order.begin(), pb.order.end(), gen(j));
    if (pos == pb.order.end()) throw PreconditionError("strong barrier of a_j does not contain a_j");
    // Entry for b = a_j is ν(C(a_j^{-1})), equal to ν(C(a_j)) under hat.
    leg.nu_matrix = nu[static_cast<std::size_t>(pos - pb.order.begin())];
    leg.f = engine.first_passage(Word(), gen(j), {}, opts.fp);
    leg.nu_ratio = leg.nu_matrix / (1.0 - leg.nu_matrix);
    leg.margin = leg.nu_ratio - leg.f.mid();
    leg.expect_strict = j == special && !self[j];
    double sigma = 0.0;
    if (opts.run_mc) {
      leg.nu_mc = mc[static_cast<std::size_t>(j - 1)];
      sigma = leg.nu_mc->at_threshold.std_err;
    }
    leg.tolerance = std::max(opts.equality_tol, 3.0 * sigma / ((1.0 - leg.nu_matrix) * (1.0 - leg.nu_matrix)));
    leg.pass = leg.expect_strict ? leg.margin > leg.tolerance : std::abs(leg.margin) <= leg.tolerance;
    const std::string a = format_word(gen(j));
    if (leg.expect_strict) {
      rep.checks.push_back({"F(e," + a + ") < nu/(1-nu)", leg.margin, 0.0, leg.tolerance, leg.pass});
    } else {
      rep.checks.push_back({"F(e," + a + ") = nu/(1-nu)", leg.f.mid(), leg.nu_ratio, leg.tolerance, leg.pass});
    }
    if (leg.nu_mc) {
      const McEstimate& e = leg.nu_mc->at_threshold;
      rep.checks.push_back(check_close("nu(C(" + a + ")) matrix vs mc", leg.nu_matrix, e.mean, 3.0 * e.std_err));
    }
    FpValue finv = engine.first_passage(Word(), gen(j, -1), {}, opts.fp);
    rep.checks.push_back(check_close("F(e," + a + ") = F(e," + a + "^-1)", leg.f.mid(), finv.mid(),
                                     leg.f.width() + finv.width() + 1e-12));
    rhos[Letter{j, 1}] = leg.f.interval();
    rhos[Letter{j, -1}] = finv.interval();
    sources[Letter{j, 1}] = sources[Letter{j, -1}] = "first-passage";
    rep.legs.push_back(std::move(leg));
  }
  rep.criterion = criterion_sum(rhos, m, 1e-9, sources);
  for (const BarrierCertificate& c : rep.structure) {
    bool expected = !(c.target == gen(special) && c.barrier_set.size() == 1 && !self[special]);
    rep.checks.push_back(check_true("{" + format_word(c.barrier_set.front()) + "} is a " + format_word(c.target) +
                                        "-barrier: " + (c.verdict ? "yes" : "no"),
                                    c.verdict == expected));
  }
  rep.pass = all_pass(rep.checks);
  return rep;
}

SymmetricCounterexampleReport example_symmetric_counterexample(const FpOptions& opts) {
  SymmetricCounterexampleReport rep;
  StepMeasure mu = preset("example-4.2-symmetric");
  std::vector<Word> images{gen(1), gen(1, -1) * gen(2)};
  StepMeasure pushed = pushforward(mu, images);
  rep.pushed_steps = pushed.steps();
  FirstPassageEngine e(mu), ep(pushed);
  rep.f_a = e.first_passage(Word(), gen(1), {}, opts);
  rep.f_b = e.first_passage(Word(), gen(2), {}, opts);
  rep.fp_a = ep.first_passage(Word(), gen(1), {}, opts);
  rep.fp_b = ep.first_passage(Word(), gen(2), {}, opts);
  rep.fp_ainv_b = ep.first_passage(Word(), gen(1, -1) * gen(2), {}, opts);

  const Word b = gen(2), ainv = gen(1, -1);
  rep.barriers.push_back(is_barrier(e, std::span<const Word>(&b, 1), b));
  rep.barriers.push_back(is_barrier(e, std::span<const Word>(&ainv, 1), ainv));
  for (const BarrierCertificate& c : rep.barriers)
    rep.checks.push_back(check_true("{" + format_word(c.target) + "} is a " + format_word(c.target) + "-barrier",
                                    c.verdict));

  FpValue f_ainv = e.first_passage(Word(), ainv, {}, opts);
  FpValue f_binv = e.first_passage(Word(), gen(2, -1), {}, opts);
  rep.checks.push_back(check_close("F(e,a^-1) = F(e,a)", f_ainv.mid(), rep.f_a.mid(), 1e-9));
  rep.checks.push_back(check_close("F(e,b^-1) = F(e,b)", f_binv.mid(), rep.f_b.mid(), 1e-9));
  for (int k = 2; k <= 5; ++k) {
    FpValue fa = e.first_passage(Word(), gen(1, -k), {}, opts);
    FpValue fb = e.first_passage(Word(), gen(2, k), {}, opts);
    rep.checks.push_back(check_close("F(e,a^-" + std::to_string(k) + ") = F(e,a^-1)^" + std::to_string(k), fa.mid(),
                                     std::pow(f_ainv.mid(), k), 1e-9));
    rep.checks.push_back(check_close("F(e,b^" + std::to_string(k) + ") = F(e,b)^" + std::to_string(k), fb.mid(),
                                     std::pow(rep.f_b.mid(), k), 1e-9));
  }

  MeasureClass cls = classify(pushed, pushed.max_range());
  rep.checks.push_back(check_true("pushforward is nearest-neighbour", cls.powers_of_generators &&
                                                                          pushed.max_range() == 1 &&
                                                                          pushed.steps().size() == 4));
  rep.checks.push_back(check_close("F(e,a) = F'(e,a)", rep.f_a.mid(), rep.fp_a.mid(), 1e-6));

  const double ta = criterion_term(rep.fp_a.mid());
  rep.lhs_original = criterion_term(rep.f_a.mid()) + criterion_term(rep.f_b.mid());
  rep.lhs_pushed = ta + criterion_term(rep.fp_ainv_b.mid());
  rep.lhs_multiplicative = ta + criterion_term(rep.fp_a.mid() * rep.fp_b.mid());
  rep.rhs = ta + criterion_term(rep.fp_b.mid());
  rep.checks.push_back(check_close("invariance", rep.lhs_original, rep.lhs_pushed, 1e-6));
  rep.checks.push_back(check_close("multiplicativity", rep.lhs_pushed, rep.lhs_multiplicative, 1e-6));

  for (int i = 1; i <= 2; ++i) {
    CylinderSolution s = solve_cylinders(assemble_power_system(compute_p_vector(ep, Letter{i, 1}, opts)));
    (i == 1 ? rep.nu_a : rep.nu_b) = s.nu[0];
  }
  rep.checks.push_back(check_close("nu'(C(a)) + nu'(C(b)) = 1/2", rep.nu_a + rep.nu_b, 0.5, 1e-8));
  rep.checks.push_back(check_close("t(F'(a)) + t(F'(b)) = nu'(C(a)) + nu'(C(b))", rep.rhs, rep.nu_a + rep.nu_b, 1e-8));
  rep.margin = rep.rhs - rep.lhs_multiplicative;
  rep.checks.push_back({"strict inequality", rep.margin, 0.0, 0.0, rep.margin > 0.0});
  rep.pass = all_pass(rep.checks);
  return rep;
}

BarrierIdentityReport example_barrier_identities(const FirstPassageEngine& engine, const McOptions& mc,
                                                 const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  const Word a = gen(1), b = gen(2), ai = gen(1, -1), bi = gen(2, -1);
  const Word ab = a * b, biai = bi * ai;
  for (const Word& w : {a, ai, ab, biai})
    if (mu.rank() != 2 || mu.prob(w) <= 0.0) throw PreconditionError("walk is not supported on a, a^-1, ab, b^-1 a^-1");
  if (mu.steps().size() != 4) throw PreconditionError("walk is not supported on a, a^-1, ab, b^-1 a^-1");

  struct Item {
    std::vector<Word> B;
    Word g;
    Word h;
  };
  const std::vector<Item> items{{{a, ab}, a, a},  {{biai}, bi, bi}, {{biai}, bi, biai},
                                {{ab}, ab, ab},   {{b}, b, b},      {{ai}, ai, ai}};
  BarrierIdentityReport rep;
  std::vector<Word> roots{a, ai, ab, b, bi, biai};
  rep.nu = estimate_cylinders(mu, roots, default_cylinder_threshold(mu, roots), mc);
  std::map<Word, double> nu, se;
  for (const CylinderEstimate& c : rep.nu) {
    nu[c.root] = c.at_threshold.mean;
    se[c.root] = c.at_threshold.std_err;
  }
  bool ok = true;
  for (const Item& it : items) {
    BarrierCertificate cert = is_barrier(engine, it.B, it.g);
    ok = ok && cert.verdict;
    std::string set;
    for (const Word& w : cert.barrier_set) set += (set.empty() ? "" : ", ") + format_word(w);
    rep.labels.push_back("B = {" + set + "}, g = " + format_word(it.g) + ", nu(C(" + format_word(it.h) + "))");
    rep.barriers.push_back(cert);
    if (!cert.verdict) {
      rep.residuals.push_back(PropResidual{});
      continue;
    }
    PropResidual r = prop_residual_check(engine, it.B, it.g, it.h, Word(), nu, se, opts);
    ok = ok && r.pass;
    rep.residuals.push_back(std::move(r));
  }
  rep.pass = ok;
  return rep;
}

}  // namespace fpwalk

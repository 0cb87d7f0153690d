// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fpwalk/barrier.hpp"
#include "fpwalk/criterion.hpp"
#include "fpwalk/cylinder.hpp"
#include "fpwalk/monte_carlo.hpp"
#include "fpwalk/presets.hpp"
#include "fpwalk/spectral.hpp"
#include "shadow_lemmas.hpp"

using namespace fpwalk;

namespace {

Word w(const char* s) { return parse_word(s, 2); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

bool within_3sigma(const Interval& bracket, const McEstimate& e) {
  double gap = 0.0;
  if (e.mean < bracket.lower) gap = bracket.lower - e.mean;
  if (e.mean > bracket.upper) gap = e.mean - bracket.upper;
  return gap <= 3.0 * e.std_err;
}

Outcome nn_exactness() {
  Outcome o;
  StepMeasure mu = preset("nn-uniform-f2");
  FirstPassageEngine eng(mu);
  double exact = nn_exact_first_passage(mu).at(Letter{1, 1});
  FpValue f = eng.first_passage(Word(), w("a1"));
  o.require(std::abs(exact - 1.0 / 3) < 1e-12, "closed form " + num(exact));
  o.require(f.lower >= 1.0 / 3 - 1e-6 && f.upper <= 1.0 / 3 + 1e-6, "F(e,a1) bracket");
  CylinderSolution s = solve_cylinders(assemble_power_system(compute_p_vector(eng, 1)));
  o.require(std::abs(s.nu[0] - 0.25) <= 1e-8, "nu = " + num(s.nu[0]));
  o.detail = o.pass ? "F=" + num(f.mid()) + " nu=" + num(s.nu[0]) : o.detail;
  return o;
}

Outcome one_geodesic() {
  Outcome o;
  FirstPassageEngine eng(preset("powers-n2-f2"));
  for (Letter d : {Letter{1, 1}, Letter{2, -1}}) {
    SpectralReport r = verify_one_geodesic(eng, d, 30);
    const std::string tag = format_word(Word::letter(d)) + ": ";
    o.require(r.lambda1 >= r.nu_ratio - 1e-6, tag + "lambda1 below nu ratio");
    o.require(r.cw.upper - r.cw.lower < 1e-4, tag + "bracket width " + num(r.cw.upper - r.cw.lower));
    o.require(r.cw.lower <= r.lambda1 + 1e-9 && r.lambda1 <= r.cw.upper + 1e-9, tag + "bracket misses lambda1");
    o.require(r.cylinders.residual < 1e-8, tag + "system residual " + num(r.cylinders.residual));
    if (o.pass && d.sign > 0)
      o.detail = "lambda1=" + num(r.lambda1) + " gap=" + num(r.gap) + " cw=[" + num(r.cw.lower) + "," +
                 num(r.cw.upper) + "]";
  }
  return o;
}

Outcome decomposition() {
  Outcome o;
  FirstPassageEngine eng(preset("powers-n2-f2"));
  for (Letter d : alphabet(2)) {
    DecompositionReport r = verify_decomposition(eng, d);
    const std::string tag = format_word(Word::letter(d)) + ": ";
    o.require(r.residual_crossing < 1e-6, tag + "crossing residual " + num(r.residual_crossing));
    o.require(r.residual_P_B < 1e-6, tag + "P_B residual " + num(r.residual_P_B));
    for (double t : r.telescoping) o.require(t < 1e-6, tag + "telescoping " + num(t));
    if (o.pass) o.detail = "max residual " + num(std::max(r.residual_crossing, r.residual_P_B));
  }
  return o;
}

Outcome matrix_identity() {
  Outcome o;
  StepMeasure mu = preset("example-4.1-antisym");
  FirstPassageEngine eng(mu);
  std::vector<Word> roots;
  std::vector<double> predicted;
  for (int i = 1; i <= 2; ++i) {
    std::vector<Word> B = minimal_strong_barrier(mu, Word::power(i, 1));
    std::vector<double> nu = nu_from_matrix_identity(compute_P_B(eng, i, B).mid());
    for (std::size_t k = 0; k < B.size(); ++k) {
      roots.push_back(invert(B[k]));
      predicted.push_back(nu[k]);
    }
  }
  McOptions mc;
  mc.samples = 1'000'000;
  mc.seed = 2024;
  auto est = estimate_cylinders(mu, roots, default_cylinder_threshold(mu, roots), mc);
  double worst = 0.0;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const McEstimate& e = est[k].at_double;
    double z = std::abs(predicted[k] - e.mean) / e.std_err;
    worst = std::max(worst, z);
    o.require(z <= 3.0, format_word(roots[k]) + " off by " + num(z) + " sigma");
  }
  if (o.pass) o.detail = std::to_string(roots.size()) + " cylinders, worst " + num(worst) + " sigma";
  return o;
}

Outcome antisymmetric_counterexample() {
  Outcome o;
  FirstPassageEngine eng(preset("example-4.1-antisym"));
  DisproofOptions opts;
  opts.mc.samples = 1'000'000;
  opts.mc.seed = 7;
  DisproofReport r = disproof_pipeline(eng, opts);
  for (const LetterLeg& leg : r.legs) {
    const std::string tag = "a" + std::to_string(leg.generator) + ": ";
    if (leg.expect_strict) {
      o.require(leg.margin > leg.tolerance, tag + "margin " + num(leg.margin));
    } else {
      o.require(std::abs(leg.margin) <= leg.tolerance, tag + "equality off by " + num(leg.margin));
    }
    o.require(leg.pass, tag + "leg failed");
  }
  for (const NamedCheck& c : r.checks) o.require(c.pass, c.name);
  o.require(r.criterion.total.upper < 1.0, "S = " + num(r.criterion.total.mid()));
  o.require(r.criterion.verdict == Verdict::violated, "verdict " + to_string(r.criterion.verdict));
  if (o.pass) o.detail = "S=" + num(r.criterion.total.mid()) + " strict margin " + num(r.legs[0].margin);
  return o;
}

Outcome symmetric_counterexample() {
  Outcome o;
  SymmetricCounterexampleReport r = example_symmetric_counterexample();
  o.require(std::abs(r.f_a.mid() - r.fp_a.mid()) < 1e-6, "automorphism leg");
  o.require(std::abs(r.nu_a + r.nu_b - 0.5) <= 1e-8, "nu'(a)+nu'(b) = " + num(r.nu_a + r.nu_b));
  o.require(r.margin > 0.0, "margin " + num(r.margin));
  for (const NamedCheck& c : r.checks) o.require(c.pass, c.name);
  if (o.pass) o.detail = "lhs=" + num(r.lhs_original) + " rhs=" + num(r.rhs) + " margin " + num(r.margin);
  return o;
}

Outcome barrier_soundness() {
  Outcome o;
  StepMeasure ex = preset("example-2.8");
  FirstPassageEngine ex_eng(ex);
  std::vector<Word> ab{w("a1"), w("a1 a2")}, a{w("a1")};
  o.require(is_barrier(ex_eng, ab, w("a1")).verdict, "{a,ab} not an a-barrier");
  BarrierCertificate neg = is_barrier(ex_eng, a, w("a1"));
  o.require(!neg.verdict && neg.witness && neg.witness->size() == 2 && neg.witness->back() == w("a1 a2"),
            "{a} witness is not e -> ab");
  StepMeasure pw = preset("powers-n2-f2");
  FirstPassageEngine pw_eng(pw);
  std::vector<Word> aa = canonical_power_barrier(pw, 1);
  o.require(is_barrier(pw_eng, aa, w("a1")).verdict, "{a,a^2} not an a-barrier");

  int positives = 0, negatives = 0;
  for (const std::string& name : preset_names()) {
    StepMeasure mu = preset(name);
    FirstPassageEngine eng(mu);
    auto words = ball(Word(), 2, mu.rank());
    for (const Word& g : words) {
      if (g.is_identity()) continue;
      for (const Word& b : words) {
        if (b.is_identity()) continue;
        std::vector<Word> B{b};
        if (g.length() == 1) B.push_back(g * g);
        BarrierCertificate c = is_barrier(eng, B, g);
        if (c.verdict) {
          ++positives;
          o.require(is_barrier(eng, B, g, mu.max_range()).verdict, name + " unstable at " + format_word(g));
        } else {
          ++negatives;
          o.require(replay_witness(mu, c), name + " witness fails to replay at " + format_word(g));
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(positives) + " stable positives, " + std::to_string(negatives) +
                         " replayed witnesses";
  return o;
}

Outcome shadow_suite() {
  Outcome o;
  testing::LemmaTally t1 = testing::check_shadow1(4), t2 = testing::check_shadow2(4), t3 = testing::check_shadow3(4);
  o.require(t1.failures == 0, "last-letter criterion: " + std::to_string(t1.failures) + " failures");
  o.require(t2.failures == 0, "inverse in letter shadow: " + std::to_string(t2.failures) + " failures");
  o.require(t3.failures == 0, "translated shadow: " + std::to_string(t3.failures) + " failures");
  if (o.pass) o.detail = std::to_string(t1.cases + t2.cases + t3.cases) + " cases";
  return o;
}

Outcome cross_oracle() {
  Outcome o;
  McOptions mc;
  mc.samples = 200'000;
  mc.seed = 31;
  int compared = 0;
  for (const std::string& name : preset_names()) {
    StepMeasure mu = preset(name);
    FirstPassageEngine eng(mu);
    for (const char* y : {"a1", "a2^-1", "a1 a2"}) {
      FpValue f = eng.first_passage(Word(), w(y));
      McEstimate e = estimate_first_passage(mu, Word(), w(y), {}, mc);
      o.require(within_3sigma(f.interval(), e), name + " F(e," + y + ") mc " + num(e.mean) + " vs " + num(f.mid()));
      ++compared;
    }
    MeasureClass cls = classify(mu, default_search_radius(mu));
    for (Letter l : alphabet(mu.rank())) {
      const Word h = Word::letter(l);
      ReturnSeries rs = nu_via_returns(eng, h, 8);
      double solved, slack;
      if (cls.powers_of_generators) {
        CylinderSolution s = solve_cylinders(assemble_power_system(compute_p_vector(eng, l)));
        solved = s.nu[0];
        slack = 1e-9;
      } else if (cls.antisymmetric) {
        // nu(C(a)) = nu(C(a^-1)) for antisymmetric walks.
        const Word a = Word::power(l.generator, 1);
        std::vector<Word> B = minimal_strong_barrier(mu, a);
        std::vector<double> nu = nu_from_matrix_identity(compute_P_B(eng, l.generator, B).mid());
        auto it = std::find(B.begin(), B.end(), a);
        solved = nu[static_cast<std::size_t>(it - B.begin())];
        slack = 1e-9;
      } else {
        CylinderEstimate c = estimate_cylinder(mu, h, default_cylinder_threshold(mu, std::vector<Word>{h}), mc);
        solved = c.at_double.mean;
        slack = 3.0 * c.at_double.std_err;
      }
      o.require(rs.total.lower <= solved + rs.total.width() + slack,
                name + " return series for " + format_word(h) + " exceeds " + num(solved));
      ++compared;
    }
  }
  if (o.pass) o.detail = std::to_string(compared) + " comparisons over " + std::to_string(preset_names().size()) +
                         " presets";
  return o;
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands{
      {"fp", "--preset", "example-2.8", "--to", "a1 a2", "--avoid", "a1"},
      {"spectral", "--preset", "powers-n2-f2", "--gen", "2"},
      {"simulate", "--preset", "example-4.1-antisym", "--target-cylinder", "a1 a2", "--samples", "100000", "--seed",
       "17"},
      {"simulate", "--preset", "powers-n2-f2", "--from", "e", "--to", "a1^2", "--samples", "100000", "--seed", "17"},
      {"criterion", "--preset", "example-4.1-antisym", "--samples", "100000", "--seed", "17"},
  };
  for (const auto& cmd : commands) {
    std::vector<std::string> reports;
    for (const char* t : {"1", "4", "8"}) {
      std::vector<std::string> args = cmd;
      args.insert(args.end(), {"--threads", t});
      std::ostringstream out, err;
      cli::run_cli(args, out, err);
      nlohmann::json doc = nlohmann::json::parse(out.str());
      doc.erase("wall_time_s");
      doc["command"].erase("args");
      reports.push_back(doc.dump());
    }
    o.require(reports[0] == reports[1] && reports[0] == reports[2], cmd[0] + " " + cmd[2] + " differs across threads");
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " reports identical at 1/4/8 threads";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "nearest-neighbour exactness", 10, nn_exactness},
      {2, "one-geodesic certificate on the powers walk", 120, one_geodesic},
      {3, "companion power decomposition", 0, decomposition},
      {4, "matrix identity against Monte Carlo", 300, matrix_identity},
      {5, "antisymmetric counterexample", 0, antisymmetric_counterexample},
      {6, "symmetric counterexample", 0, symmetric_counterexample},
      {7, "barrier decision soundness", 0, barrier_soundness},
      {8, "shadow lemmas up to length 4", 30, shadow_suite},
      {9, "cross-oracle coherence", 0, cross_oracle},
      {10, "determinism across thread counts", 0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) out.require(false, "over time budget " + num(c.budget_s) + " s");
    if (!out.pass) ++failed;
    std::printf("%s  %2d  %-45s %7.2fs  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

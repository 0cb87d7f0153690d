#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fpwalk/barrier.hpp"
#include "fpwalk/criterion.hpp"
#include "fpwalk/cylinder.hpp"
#include "fpwalk/errors.hpp"
#include "fpwalk/first_passage.hpp"
#include "fpwalk/measure.hpp"
#include "fpwalk/monte_carlo.hpp"
#include "fpwalk/presets.hpp"
#include "fpwalk/spectral.hpp"

#ifndef FPWALK_VERSION
#define FPWALK_VERSION "0.0.0"
#endif

namespace fpwalk::cli {

namespace {

using json = nlohmann::ordered_json;

class UnknownCase : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string config;
  std::string preset_name;
  int threads = 0;
  std::uint64_t seed = 1;
  std::uint64_t samples = 0;
  int k_max = 30;
  int gen = 0;
  std::string from = "e";
  std::string to;
  std::string avoid;
  std::string set;
  std::string target;
  std::string target_cylinder;
  std::string case_name;
  double tol = 1e-10;
  bool strong = false;
  int threshold = 0;
  std::int64_t cutoff = 10'000;
  int core_radius = 0;
};

struct Walk {
  StepMeasure mu;
  std::string source;
};

struct Report {
  json results = json::object();
  json tolerances = json::object();
  std::vector<NamedCheck> checks;
  std::optional<Walk> walk;

  void add(NamedCheck c) { checks.push_back(std::move(c)); }
  void add(const std::vector<NamedCheck>& cs) { checks.insert(checks.end(), cs.begin(), cs.end()); }
  void flag(std::string name, bool ok) { checks.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, ok}); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Walk load_walk(const Options& o) {
  std::string spec = !o.preset_name.empty() ? o.preset_name : o.config;
  if (spec.empty()) throw ConfigError("no walk given; use --config PATH or --preset NAME");
  if (!o.preset_name.empty() || !std::ifstream(spec)) {
    if (auto p = find_preset(spec)) return {*p, "preset:" + spec};
    if (!o.preset_name.empty()) throw ConfigError("unknown preset '" + spec + "'");
  }
  return {load_measure(read_file(spec)), spec};
}

std::vector<Word> parse_list(const std::string& text, int rank) {
  std::vector<Word> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_word(item, rank));
  }
  return out;
}

json jword(const Word& w) { return format_word(w); }

json jwords(const std::vector<Word>& ws) {
  json a = json::array();
  for (const Word& w : ws) a.push_back(format_word(w));
  return a;
}

json jfp(const FpValue& v) {
  return {{"lower", v.lower},
          {"upper", v.upper},
          {"bound_type", "certified-lower/heuristic-upper"},
          {"iterations", v.iterations},
          {"converged", v.converged}};
}

json jinterval(const Interval& v, const char* bound) {
  return {{"lower", v.lower}, {"upper", v.upper}, {"bound_type", bound}};
}

json jmc(const McEstimate& e) {
  return {{"mean", e.mean},
          {"stderr", e.std_err},
          {"bound_type", "mc-mean±stderr"},
          {"n_samples", e.n_samples},
          {"cutoff_steps", e.cutoff_steps},
          {"seed", e.seed},
          {"truncated_fraction", e.truncated_fraction},
          {"escaped_fraction", e.escaped_fraction}};
}

json jcyl(const CylinderEstimate& c) {
  return {{"root", jword(c.root)},
          {"estimate", jmc(c.at_threshold)},
          {"at_double_threshold", jmc(c.at_double)},
          {"drift_sigma", c.drift_sigma}};
}

json jcert(const BarrierCertificate& c) {
  json j = {{"barrier_set", jwords(c.barrier_set)},
            {"target", jword(c.target)},
            {"kind", to_string(c.kind)},
            {"verdict", c.verdict},
            {"method", c.method},
            {"core_radius", c.core_radius},
            {"stable", c.stable}};
  if (c.witness) j["witness"] = jwords(*c.witness);
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

json jmatrix(const Matrix& m) {
  json a = json::array();
  for (const auto& row : m.to_rows()) a.push_back(row);
  return a;
}

json jcriterion(const CriterionReport& r) {
  json terms = json::array();
  for (const CriterionTerm& t : r.per_letter) {
    terms.push_back({{"letter", jword(Word::letter(t.letter))},
                     {"rho", jinterval(t.rho, t.source == "kth-root-estimate" ? "estimate" : "certified-interval")},
                     {"term", jinterval(t.term, "derived")},
                     {"source", t.source}});
  }
  return {{"per_letter", terms},
          {"total", jinterval(r.total, "derived")},
          {"margin", r.margin},
          {"tol", r.tol},
          {"verdict", to_string(r.verdict)}};
}

json jspectral(const SpectralReport& s) {
  json p = json::array();
  for (const FpValue& v : s.p.values) p.push_back(jfp(v));
  json lemma = {{"hypothesis_met", s.lemma32.hypothesis_met},
                {"inequality_slack", s.lemma32.inequality_slack},
                {"cone_slack", s.lemma32.cone_slack},
                {"pass", s.lemma32.pass}};
  json dec = {{"residual_crossing", s.decomposition.residual_crossing},
              {"residual_P_B", s.decomposition.residual_P_B},
              {"telescoping", s.decomposition.telescoping},
              {"tolerance", s.decomposition.tolerance},
              {"companion_power", jmatrix(s.decomposition.companion_power)},
              {"reversed_P_B", jmatrix(s.decomposition.reversed_P_B)},
              {"pass", s.decomposition.pass}};
  json ratios = json::array();
  for (const Interval& r : s.rho.sequence.ratios) ratios.push_back(r.mid());
  return {{"direction", jword(Word::letter(s.direction))},
          {"p", p},
          {"lambda1", s.lambda1},
          {"lambda1_power_iteration", s.lambda1_power},
          {"collatz_wielandt", {{"k", s.cw_k}, {"lower", s.cw.lower}, {"upper", s.cw.upper}}},
          {"nu", s.cylinders.nu},
          {"system_residual", s.cylinders.residual},
          {"ordering_verified", s.cylinders.ordering_verified},
          {"nu_ratio", s.nu_ratio},
          {"gap", s.gap},
          {"inequality_certified", s.inequality_certified},
          {"hypothesis_status", s.hypothesis_met ? "met" : "hypothesis unmet"},
          {"rho", {{"kth_root", s.rho.kth_root}, {"last_ratio", s.rho.last_ratio}, {"ratios", ratios}}},
          {"lemma32", lemma},
          {"decomposition", dec}};
}

json jchecks(const std::vector<NamedCheck>& cs) {
  json a = json::array();
  for (const NamedCheck& c : cs) {
    a.push_back({{"name", c.name},
                 {"pass", c.pass},
                 {"value", c.value},
                 {"expected", c.expected},
                 {"tolerance", c.tolerance}});
  }
  return a;
}

McOptions mc_options(const Options& o, std::uint64_t default_samples) {
  McOptions m;
  m.samples = o.samples > 0 ? o.samples : default_samples;
  m.seed = o.seed;
  m.threads = o.threads;
  m.cutoff_steps = o.cutoff;
  return m;
}

FpOptions fp_options(const Options& o) {
  if (!(o.tol > 0.0) || !std::isfinite(o.tol)) throw PreconditionError("--tol must be positive");
  FpOptions f;
  f.tol = o.tol;
  f.core_radius = o.core_radius;
  return f;
}

// ---- subcommands ----

void cmd_validate(const Walk& w, Report& r) {
  const StepMeasure& mu = w.mu;
  MeasureClass c = classify(mu, default_search_radius(mu));
  json steps = json::array();
  for (const Step& s : mu.steps()) steps.push_back({{"word", jword(s.word)}, {"prob", s.prob}});
  r.results = {{"rank", mu.rank()},
               {"max_range", mu.max_range()},
               {"steps", steps},
               {"symmetric", c.symmetric},
               {"antisymmetric", c.antisymmetric},
               {"powers_of_generators", c.powers_of_generators},
               {"admissible", to_string(c.admissible)},
               {"admissibility_method", c.admissibility_method}};
}

void cmd_fp(const Walk& w, const Options& o, Report& r) {
  FpOptions f = fp_options(o);
  const int m = w.mu.rank();
  if (o.to.empty()) throw PreconditionError("--to is required");
  Word x = parse_word(o.from, m), y = parse_word(o.to, m);
  std::vector<Word> avoid = parse_list(o.avoid, m);
  FirstPassageEngine engine(w.mu);
  FpValue v = engine.first_passage(x, y, avoid, f);
  r.tolerances["tol"] = f.tol;
  r.results = {{"from", jword(x)}, {"to", jword(y)}, {"avoid", jwords(avoid)}, {"value", jfp(v)}};
  r.flag("value iteration converged", v.converged);
}

void cmd_barrier(const Walk& w, const Options& o, Report& r) {
  const int m = w.mu.rank();
  if (o.set.empty() || o.target.empty()) throw PreconditionError("--set and --target are required");
  std::vector<Word> B = parse_list(o.set, m);
  Word g = parse_word(o.target, m);
  BarrierCertificate c;
  if (o.strong) {
    c = is_strong_barrier(w.mu, B, g);
  } else {
    FirstPassageEngine engine(w.mu);
    c = is_barrier(engine, B, g, o.core_radius);
  }
  r.results = {{"certificate", jcert(c)}};
  if (c.verdict) {
    r.flag("positive verdict stable under core enlargement", c.stable);
  } else {
    bool replay = replay_witness(w.mu, c);
    r.results["witness_replays"] = replay;
    r.flag("witness replays", replay);
  }
}

void cmd_cylinders(const Walk& w, const Options& o, Report& r) {
  FpOptions f = fp_options(o);
  const StepMeasure& mu = w.mu;
  FirstPassageEngine engine(mu);
  if (!o.target_cylinder.empty()) {
    Word h = parse_word(o.target_cylinder, mu.rank());
    ReturnSeries s = nu_via_returns(engine, h, o.k_max, f);
    json terms = json::array();
    for (const FpValue& t : s.terms) terms.push_back(jfp(t));
    r.results = {{"root", jword(h)},
                 {"entry_set", jwords(s.entry_set)},
                 {"exit_set", jwords(s.exit_set)},
                 {"terms", terms},
                 {"lower_bound", {{"value", s.total.lower}, {"bound_type", "certified-lower"}}}};
    if (o.samples > 0) {
      CylinderEstimate e = estimate_cylinder(mu, h, o.threshold > 0 ? o.threshold : default_cylinder_threshold(mu, {&h, 1}),
                                             mc_options(o, o.samples));
      r.results["mc"] = jcyl(e);
      r.add({"return-series lower bound below mc + 3 sigma", s.total.lower, e.at_threshold.mean,
             3.0 * e.at_threshold.std_err, s.total.lower <= e.at_threshold.mean + 3.0 * e.at_threshold.std_err});
    }
    return;
  }
  if (!o.set.empty()) {
    if (o.gen < 1) throw PreconditionError("--gen is required with --set");
    std::vector<Word> B = parse_list(o.set, mu.rank());
    BarrierMatrix pb = compute_P_B(engine, o.gen, B, f);
    std::vector<double> nu = nu_from_matrix_identity(pb.mid());
    json rows = json::array();
    for (std::size_t k = 0; k < pb.order.size(); ++k)
      rows.push_back({{"root", jword(invert(pb.order[k]))}, {"nu", nu[k]}, {"bound_type", "derived"}});
    r.results = {{"barrier", jwords(pb.order)}, {"P_B", jmatrix(pb.mid())}, {"max_width", pb.max_width()}, {"nu", rows}};
    return;
  }
  MeasureClass cls = classify(mu, mu.max_range());
  if (!cls.powers_of_generators) {
    throw PreconditionError("cylinder system needs a powers-of-generators walk; use --set or --target-cylinder");
  }
  json dirs = json::array();
  for (const Letter& l : alphabet(mu.rank())) {
    if (o.gen > 0 && l.generator != o.gen) continue;
    PVector p = compute_p_vector(engine, l, f);
    CylinderSystem sys = assemble_power_system(p);
    CylinderSolution sol = solve_cylinders(sys);
    json pj = json::array();
    for (const FpValue& v : p.values) pj.push_back(jfp(v));
    dirs.push_back({{"direction", jword(Word::letter(l))},
                    {"p", pj},
                    {"labels", sys.labels},
                    {"nu", sol.nu},
                    {"residual", sol.residual},
                    {"ordering_verified", sol.ordering_verified}});
    r.add({"system residual " + format_word(Word::letter(l)), sol.residual, 0.0, 1e-8, sol.residual < 1e-8});
  }
  r.tolerances["system_residual"] = 1e-8;
  r.results = {{"directions", dirs}};
}

void cmd_spectral(const Walk& w, const Options& o, Report& r) {
  FpOptions f = fp_options(o);
  FirstPassageEngine engine(w.mu);
  int g = o.gen > 0 ? o.gen : 1;
  SpectralReport s = verify_one_geodesic(engine, Letter{g, 1}, o.k_max, 1e-6, f);
  r.results = jspectral(s);
  r.tolerances = {{"inequality", 1e-6}, {"bracket_width", 1e-4}, {"system_residual", 1e-8}, {"decomposition", 1e-6}};
  r.flag("ordering hypothesis", s.hypothesis_met);
  r.add({"lambda1 >= nu1/(1-nu1)", s.gap, 0.0, 1e-6, s.inequality_certified});
  r.flag("bracket contains lambda1", s.bracket_contains_lambda);
  r.add({"bracket width", s.cw.upper - s.cw.lower, 0.0, 1e-4, s.cw.upper - s.cw.lower < 1e-4});
  r.add({"system residual", s.cylinders.residual, 0.0, 1e-8, s.cylinders.residual < 1e-8});
  r.add({"bisection vs power iteration", s.lambda1_power, s.lambda1, 1e-10,
         std::abs(s.lambda1_power - s.lambda1) < 1e-10});
  r.flag("decomposition identity", s.decomposition.pass);
  r.flag("cylinder ratio inequalities", s.lemma32.pass);
}

void cmd_criterion(const Walk& w, const Options& o, Report& r) {
  FpOptions f = fp_options(o);
  const StepMeasure& mu = w.mu;
  FirstPassageEngine engine(mu);
  MeasureClass cls = classify(mu, mu.max_range());
  if (cls.symmetric && cls.powers_of_generators) {
    CorollaryReport c = corollary_pipeline(engine, 1e-8, f);
    r.results = {{"pipeline", "corollary"}, {"criterion", jcriterion(c.criterion)}, {"nu", c.nu}};
    r.add(c.checks);
    r.tolerances["criterion"] = 1e-8;
    return;
  }
  if (cls.antisymmetric) {
    try {
      DisproofOptions d;
      d.mc = mc_options(o, 1'000'000);
      d.distance_threshold = o.threshold;
      d.fp = f;
      DisproofReport rep = disproof_pipeline(engine, d);
      json legs = json::array();
      for (const LetterLeg& l : rep.legs) {
        json j = {{"generator", l.generator},
                  {"strong_barrier", jwords(l.strong_barrier)},
                  {"nu_matrix", l.nu_matrix},
                  {"F", jfp(l.f)},
                  {"nu_ratio", l.nu_ratio},
                  {"margin", l.margin},
                  {"expect_strict", l.expect_strict}};
        if (l.nu_mc) j["nu_mc"] = jcyl(*l.nu_mc);
        legs.push_back(j);
      }
      json structure = json::array();
      for (const BarrierCertificate& c : rep.structure) structure.push_back(jcert(c));
      r.results = {{"pipeline", "disproof"},
                   {"special_generator", rep.special_generator},
                   {"structure", structure},
                   {"legs", legs},
                   {"criterion", jcriterion(rep.criterion)}};
      r.add(rep.checks);
      return;
    } catch (const PreconditionError&) {
      // structure not met: fall through to raw estimates
    }
  }
  std::map<Letter, Interval> rhos;
  std::map<Letter, std::string> src;
  for (const Letter& l : alphabet(mu.rank())) {
    RhoEstimate e = rho_estimate(engine, l, std::max(o.k_max, std::max(3, mu.max_range())), 1e-4, f);
    rhos[l] = {std::min(e.kth_root, e.last_ratio), std::max(e.kth_root, e.last_ratio)};
    src[l] = "kth-root-estimate";
  }
  r.results = {{"pipeline", "kth-root-estimate"}, {"criterion", jcriterion(criterion_sum(rhos, mu.rank(), 1e-9, src))}};
}

void cmd_simulate(const Walk& w, const Options& o, Report& r) {
  const StepMeasure& mu = w.mu;
  McOptions m = mc_options(o, 1'000'000);
  if (!o.target_cylinder.empty()) {
    Word h = parse_word(o.target_cylinder, mu.rank());
    int t = o.threshold > 0 ? o.threshold : default_cylinder_threshold(mu, {&h, 1});
    CylinderEstimate e = estimate_cylinder(mu, h, t, m);
    r.results = {{"kind", "cylinder"}, {"distance_threshold", t}, {"cylinder", jcyl(e)}};
    return;
  }
  if (o.to.empty()) throw PreconditionError("simulate needs --target-cylinder or --to");
  Word x = parse_word(o.from, mu.rank()), y = parse_word(o.to, mu.rank());
  std::vector<Word> avoid = parse_list(o.avoid, mu.rank());
  McEstimate e = estimate_first_passage(mu, x, y, avoid, m);
  r.results = {{"kind", "first-passage"}, {"from", jword(x)}, {"to", jword(y)}, {"avoid", jwords(avoid)},
               {"estimate", jmc(e)}};
}

// ---- reproduce ----

void case_powers(const Options& o, Report& r) {
  StepMeasure mu = preset("powers-n2-f2");
  r.walk = Walk{mu, "preset:powers-n2-f2"};
  FirstPassageEngine engine(mu);
  const int n = mu.max_range();
  std::vector<Word> roots;
  for (int i = 1; i <= mu.rank(); ++i)
    for (int k = 1; k <= n; ++k) {
      roots.push_back(Word::power(i, k));
      roots.push_back(Word::power(i, -k));
    }
  std::vector<CylinderEstimate> mc = estimate_cylinders(mu, roots, default_cylinder_threshold(mu, roots),
                                                        mc_options(o, 1'000'000));
  std::map<Word, CylinderEstimate> by_root;
  for (const CylinderEstimate& c : mc) by_root.emplace(c.root, c);
  json gens = json::array();
  for (int i = 1; i <= mu.rank(); ++i) {
    PVector p = compute_p_vector(engine, Letter{i, 1});
    CylinderSolution sol = solve_cylinders(assemble_power_system(p));
    const std::string a = format_word(Word::power(i, 1));
    r.add({"system residual " + a, sol.residual, 0.0, 1e-8, sol.residual < 1e-8});
    r.flag("ordering " + a, sol.ordering_verified);
    std::map<Word, double> nu;
    for (int k = 1; k <= n; ++k) {
      nu[Word::power(i, k)] = nu[Word::power(i, -k)] = sol.nu[k - 1];
      for (int s : {1, -1}) {
        const McEstimate& e = by_root.at(Word::power(i, s * k)).at_threshold;
        r.add({"nu(C(" + format_word(Word::power(i, s * k)) + ")) system vs mc", sol.nu[k - 1], e.mean, 3.0 * e.std_err,
               std::abs(sol.nu[k - 1] - e.mean) <= 3.0 * e.std_err});
      }
    }
    std::vector<Word> B = canonical_power_barrier(mu, i);
    json ids = json::array();
    for (int k = 1; k <= n; ++k) {
      PropResidual pr = prop_residual_check(engine, B, Word::power(i, 1), Word::power(i, k), Word(), nu);
      ids.push_back({{"h", format_word(Word::power(i, k))}, {"lhs", pr.lhs}, {"rhs", pr.rhs}, {"residual", pr.residual}});
      r.add({"barrier identity h = " + format_word(Word::power(i, k)), pr.residual, 0.0, 1e-8, pr.residual < 1e-8});
    }
    json pj = json::array();
    for (const FpValue& v : p.values) pj.push_back(jfp(v));
    gens.push_back({{"generator", i}, {"p", pj}, {"nu", sol.nu}, {"identities", ids}});
  }
  json mcj = json::array();
  for (const CylinderEstimate& c : mc) mcj.push_back(jcyl(c));
  r.results = {{"generators", gens}, {"mc", mcj}};
}

void case_barrier_identities(const Options& o, Report& r) {
  StepMeasure mu = preset("example-2.8");
  r.walk = Walk{mu, "preset:example-2.8"};
  FirstPassageEngine engine(mu);
  BarrierIdentityReport rep = example_barrier_identities(engine, mc_options(o, 1'000'000));
  json ids = json::array();
  for (std::size_t k = 0; k < rep.labels.size(); ++k) {
    const PropResidual& p = rep.residuals[k];
    ids.push_back({{"identity", rep.labels[k]},
                   {"barrier", jcert(rep.barriers[k])},
                   {"lhs", p.lhs},
                   {"rhs", p.rhs},
                   {"residual", p.residual},
                   {"tolerance", p.tolerance}});
    r.flag("barrier " + rep.labels[k], rep.barriers[k].verdict);
    r.add({"identity " + rep.labels[k], p.residual, 0.0, p.tolerance, p.pass});
  }
  json mc = json::array();
  for (const CylinderEstimate& c : rep.nu) mc.push_back(jcyl(c));
  r.results = {{"identities", ids}, {"mc", mc}};
}

void case_disproof(const Options& o, Report& r) {
  StepMeasure mu = preset("example-4.1-antisym");
  r.walk = Walk{mu, "preset:example-4.1-antisym"};
  Report inner;
  cmd_criterion(*r.walk, o, inner);
  r.results = inner.results;
  r.add(inner.checks);
  const json& crit = r.results["criterion"];
  double total = crit["total"]["upper"].get<double>();
  r.add({"criterion violated (S < 1)", total, 1.0, 0.0, crit["verdict"] == "violated"});
}

void case_symmetric(const Options& o, Report& r) {
  r.walk = Walk{preset("example-4.2-symmetric"), "preset:example-4.2-symmetric"};
  SymmetricCounterexampleReport s = example_symmetric_counterexample(fp_options(o));
  json pushed = json::array();
  for (const Step& st : s.pushed_steps) pushed.push_back({{"word", jword(st.word)}, {"prob", st.prob}});
  json barriers = json::array();
  for (const BarrierCertificate& c : s.barriers) barriers.push_back(jcert(c));
  r.results = {{"pushforward", pushed},
               {"F_a", jfp(s.f_a)},
               {"F_b", jfp(s.f_b)},
               {"F_pushed_a", jfp(s.fp_a)},
               {"F_pushed_b", jfp(s.fp_b)},
               {"F_pushed_ainv_b", jfp(s.fp_ainv_b)},
               {"barriers", barriers},
               {"chain",
                {{"original", s.lhs_original},
                 {"pushed", s.lhs_pushed},
                 {"multiplicative", s.lhs_multiplicative},
                 {"cylinder_sum", s.rhs}}},
               {"nu_pushed", {{"a1", s.nu_a}, {"a2", s.nu_b}}},
               {"margin", s.margin}};
  r.add(s.checks);
}

void case_one_geodesic(const Options& o, Report& r) {
  StepMeasure mu = preset("powers-n2-f2");
  r.walk = Walk{mu, "preset:powers-n2-f2"};
  FpOptions f = fp_options(o);
  FirstPassageEngine engine(mu);
  json gens = json::array();
  for (int i = 1; i <= mu.rank(); ++i) {
    Walk w{mu, ""};
    Options oi = o;
    oi.gen = i;
    Report inner;
    cmd_spectral(w, oi, inner);
    gens.push_back(inner.results);
    for (NamedCheck c : inner.checks) {
      c.name += " (" + format_word(Word::power(i, 1)) + ")";
      r.add(c);
    }
  }
  CorollaryReport c = corollary_pipeline(engine, 1e-8, f);
  r.add(c.checks);
  r.results = {{"generators", gens}, {"criterion", jcriterion(c.criterion)}};
}

void cmd_reproduce(const Options& o, Report& r) {
  const std::string& c = o.case_name;
  if (c == "example-2.5") {
    case_powers(o, r);
  } else if (c == "example-2.7" || c == "example-2.8") {
    case_barrier_identities(o, r);
  } else if (c == "example-4.1") {
    case_disproof(o, r);
  } else if (c == "example-4.2") {
    case_symmetric(o, r);
  } else if (c == "one-geodesic") {
    case_one_geodesic(o, r);
  } else {
    throw UnknownCase("unknown case '" + c +
                      "'; known: example-2.5, example-2.7, example-4.1, example-4.2, one-geodesic");
  }
  r.results["case"] = c;
}

json base_report(const std::string& sub, const std::vector<std::string>& args) {
  return {{"tool", "fpwalk"}, {"version", FPWALK_VERSION}, {"command", {{"subcommand", sub}, {"args", args}}}};
}

}  // namespace

std::string walk_digest(const std::string& canonical) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fpwalk: first-passage functions, barriers and harmonic measure of random walks on free groups"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", FPWALK_VERSION);
  Options o;

  auto walk_opts = [&](CLI::App* s) {
    s->add_option("--config", o.config, "walk JSON file or preset name");
    s->add_option("--preset", o.preset_name, "embedded preset name");
  };
  auto mc_opts = [&](CLI::App* s) {
    s->add_option("--samples", o.samples, "Monte Carlo sample count");
    s->add_option("--seed", o.seed, "root seed");
    s->add_option("--threads", o.threads, "worker threads (results do not depend on it)");
    s->add_option("--threshold", o.threshold, "cylinder distance threshold");
    s->add_option("--cutoff", o.cutoff, "step cutoff per path");
  };
  auto threads_opt = [&](CLI::App* s) {
    s->add_option("--threads", o.threads, "worker threads (results do not depend on it)");
  };
  auto fp_opts = [&](CLI::App* s) {
    s->add_option("--tol", o.tol, "relative tolerance of the upper bound");
    s->add_option("--core-radius", o.core_radius, "extra explicit radius for the reduced chain");
  };

  CLI::App* validate = app.add_subcommand("validate", "load and classify a walk");
  walk_opts(validate);
  threads_opt(validate);

  CLI::App* fp = app.add_subcommand("fp", "first-passage probability F(x, y; avoid)");
  walk_opts(fp);
  threads_opt(fp);
  fp_opts(fp);
  fp->add_option("--from", o.from, "start word");
  fp->add_option("--to", o.to, "target word")->required();
  fp->add_option("--avoid", o.avoid, "comma-separated words to avoid");

  CLI::App* barrier = app.add_subcommand("barrier", "decide (strong) barriers");
  walk_opts(barrier);
  threads_opt(barrier);
  barrier->add_option("--set", o.set, "comma-separated barrier words")->required();
  barrier->add_option("--target", o.target, "shadow root g")->required();
  barrier->add_flag("--strong", o.strong, "test the strong barrier property");
  barrier->add_option("--core-radius", o.core_radius, "extra explicit radius for the reduced chain");

  CLI::App* cylinders = app.add_subcommand("cylinders", "cylinder measures nu(C(g))");
  walk_opts(cylinders);
  fp_opts(cylinders);
  mc_opts(cylinders);
  cylinders->add_option("--gen", o.gen, "generator index");
  cylinders->add_option("--set", o.set, "strong barrier for the matrix identity");
  cylinders->add_option("--target-cylinder", o.target_cylinder, "root h for the return series");
  cylinders->add_option("--k-max", o.k_max, "return series length");

  CLI::App* spectral = app.add_subcommand("spectral", "Perron root, bracket and decomposition");
  walk_opts(spectral);
  threads_opt(spectral);
  fp_opts(spectral);
  spectral->add_option("--gen", o.gen, "generator index");
  spectral->add_option("--k-max", o.k_max, "length of the ratio sequence");

  CLI::App* criterion = app.add_subcommand("criterion", "evaluate the singularity criterion sum");
  walk_opts(criterion);
  fp_opts(criterion);
  mc_opts(criterion);
  criterion->add_option("--k-max", o.k_max, "k for raw k-th root estimates");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo oracle");
  walk_opts(simulate);
  mc_opts(simulate);
  simulate->add_option("--target-cylinder", o.target_cylinder, "estimate nu(C(h))");
  simulate->add_option("--from", o.from, "start word");
  simulate->add_option("--to", o.to, "target word");
  simulate->add_option("--avoid", o.avoid, "comma-separated words to avoid");

  CLI::App* reproduce = app.add_subcommand("reproduce", "run a named certificate chain");
  mc_opts(reproduce);
  fp_opts(reproduce);
  reproduce->add_option("--case", o.case_name, "example-2.5|example-2.7|example-4.1|example-4.2|one-geodesic")
      ->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  json doc = base_report(name, args);
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  int code = kOk;
  std::string kind, message;
  try {
    if (name == "reproduce") {
      cmd_reproduce(o, r);
    } else {
      r.walk = load_walk(o);
      const Walk& w = *r.walk;
      if (name == "validate") cmd_validate(w, r);
      else if (name == "fp") cmd_fp(w, o, r);
      else if (name == "barrier") cmd_barrier(w, o, r);
      else if (name == "cylinders") cmd_cylinders(w, o, r);
      else if (name == "spectral") cmd_spectral(w, o, r);
      else if (name == "criterion") cmd_criterion(w, o, r);
      else if (name == "simulate") cmd_simulate(w, o, r);
    }
  } catch (const UnknownCase& e) {
    code = kUnknownCase, kind = "unknown-case", message = e.what();
  } catch (const fpwalk::ParseError& e) {
    code = kInvalidConfig, kind = "parse-error", message = e.what();
  } catch (const ConfigError& e) {
    code = kInvalidConfig, kind = "config-error", message = e.what();
  } catch (const SingularMatrixError& e) {
    code = kPrecondition, kind = "singular-matrix", message = e.what();
  } catch (const PreconditionError& e) {
    code = kPrecondition, kind = "precondition", message = e.what();
  } catch (const std::exception& e) {
    code = kPrecondition, kind = "error", message = e.what();
  }
  if (r.walk) {
    std::string canon = r.walk->mu.canonical_string();
    doc["walk"] = {{"source", r.walk->source}, {"digest", walk_digest(canon)}, {"canonical", canon}};
  }
  if (code != kOk) {
    err << "fpwalk " << name << ": " << message << "\n";
    doc["error"] = {{"kind", kind}, {"message", message}};
    doc["exit_code"] = code;
    out << doc.dump(2) << "\n";
    return code;
  }
  bool ok = std::all_of(r.checks.begin(), r.checks.end(), [](const NamedCheck& c) { return c.pass; });
  for (const NamedCheck& c : r.checks)
    if (!c.pass) err << "check failed: " << c.name << "\n";
  code = ok ? kOk : kCheckFailed;
  doc["results"] = r.results;
  doc["tolerances"] = r.tolerances;
  doc["checks"] = jchecks(r.checks);
  doc["status"] = ok ? "ok" : "check-failed";
  doc["exit_code"] = code;
  doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << doc.dump(2) << "\n";
  return code;
}

}  // namespace fpwalk::cli

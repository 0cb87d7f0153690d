#include "fpwalk/barrier.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "fpwalk/errors.hpp"

namespace fpwalk {

namespace {

std::vector<Word> sorted_set(std::span<const Word> B) {
  std::vector<Word> out(B.begin(), B.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool contains(const std::vector<Word>& sorted, const Word& w) {
  return std::binary_search(sorted.begin(), sorted.end(), w);
}

std::vector<Word> without(const std::vector<Word>& set, const Word& w) {
  std::vector<Word> out;
  for (const Word& x : set)
    if (!(x == w)) out.push_back(x);
  return out;
}

// Shortest support path from `source` into C_fin(g) avoiding `blocked`.
// Layers are explored in shortlex order, so the path is the least one among
// the shortest. Gives up after `cap` visited words.
std::optional<std::vector<Word>> shortest_path_into_shadow(const StepMeasure& mu, const Word& source, const Word& g,
                                                           const std::vector<Word>& blocked, std::size_t cap) {
  std::unordered_map<Word, Word, WordHash> parent;
  parent.emplace(source, source);
  std::vector<Word> layer{source};
  std::vector<Word> steps;
  for (const Step& s : mu.steps()) steps.push_back(s.word);
  auto trace = [&](Word w) {
    std::vector<Word> path{w};
    while (!(w == source)) {
      w = parent.at(w);
      path.push_back(w);
    }
    std::reverse(path.begin(), path.end());
    return path;
  };
  if (in_shadow(source, g)) return trace(source);
  while (!layer.empty() && parent.size() < cap) {
    std::vector<Word> next;
    for (const Word& w : layer) {
      for (const Word& s : steps) {
        Word y = w * s;
        if (contains(blocked, y) || parent.count(y)) continue;
        parent.emplace(y, w);
        next.push_back(y);
      }
    }
    std::sort(next.begin(), next.end());
    for (const Word& y : next)
      if (in_shadow(y, g)) return trace(y);
    layer = std::move(next);
  }
  return std::nullopt;
}

constexpr std::size_t kWitnessCap = 4'000'000;

}  // namespace

std::string to_string(BarrierKind k) { return k == BarrierKind::barrier ? "barrier" : "strong_barrier"; }

BarrierCertificate is_barrier(const FirstPassageEngine& engine, std::span<const Word> B, const Word& g,
                              int core_radius) {
  if (g.is_identity()) throw PreconditionError("barrier target must not be the identity");
  const StepMeasure& mu = engine.measure();
  BarrierCertificate cert;
  cert.barrier_set = sorted_set(B);
  cert.target = g;
  cert.kind = BarrierKind::barrier;
  cert.core_radius = core_radius;
  cert.method =
      "exact reachability: branches of the tree that hold no word of B or g are replaced by their cone exit "
      "kernels; an entering step crosses g, so the shadow is reached iff a chain state inside C_fin(g) is";
  std::optional<Word> hit = engine.reaches_shadow(Word(), g, cert.barrier_set, core_radius);
  cert.verdict = !hit.has_value();
  std::optional<Word> wider = engine.reaches_shadow(Word(), g, cert.barrier_set, core_radius + mu.max_range());
  cert.stable = (wider.has_value() == hit.has_value());
  if (!cert.verdict) {
    cert.witness = shortest_path_into_shadow(mu, Word(), g, cert.barrier_set, kWitnessCap);
    if (!cert.witness) {
      cert.witness = std::vector<Word>{};
      cert.reason = "shadow reachable at " + format_word(*hit) + "; explicit path search exceeded its budget";
    } else {
      cert.reason = "support path enters C_fin(g) avoiding B";
    }
  }
  return cert;
}

BarrierCertificate is_strong_barrier(const StepMeasure& mu, std::span<const Word> B, const Word& g) {
  if (g.is_identity()) throw PreconditionError("barrier target must not be the identity");
  BarrierCertificate cert;
  cert.barrier_set = sorted_set(B);
  cert.target = g;
  cert.kind = BarrierKind::strong_barrier;
  cert.method =
      "entry scan: a step from outside C_fin(g) into it passes through g, so it lands in C_fin(g) within "
      "distance n-1 of g; every such landing point must lie in B";
  for (const Word& b : cert.barrier_set) {
    if (!in_shadow(b, g)) {
      cert.verdict = false;
      cert.witness = std::vector<Word>{};
      cert.reason = "barrier element " + format_word(b) + " lies outside C_fin(g)";
      return cert;
    }
  }
  std::vector<Word> landings;
  for_each_in_ball(g, mu.max_range() - 1, mu.rank(), [&](const Word& v) {
    if (in_shadow(v, g)) landings.push_back(v);
    return true;
  });
  std::sort(landings.begin(), landings.end());
  for (const Word& v : landings) {
    if (contains(cert.barrier_set, v)) continue;
    for (const Step& s : mu.steps()) {
      Word u = v * invert(s.word);
      if (!in_shadow(u, g)) {
        cert.verdict = false;
        cert.witness = std::vector<Word>{u, v};
        cert.reason = "step " + format_word(s.word) + " enters C_fin(g) outside B";
        return cert;
      }
    }
  }
  cert.verdict = true;
  return cert;
}

std::vector<Word> minimal_strong_barrier(const StepMeasure& mu, const Word& g) {
  if (g.is_identity()) throw PreconditionError("barrier target must not be the identity");
  std::vector<Word> out;
  for_each_in_ball(g, mu.max_range() - 1, mu.rank(), [&](const Word& v) {
    if (!in_shadow(v, g)) return true;
    for (const Step& s : mu.steps()) {
      if (!in_shadow(v * invert(s.word), g)) {
        out.push_back(v);
        break;
      }
    }
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool replay_witness(const StepMeasure& mu, const BarrierCertificate& cert) {
  if (cert.verdict || !cert.witness) return false;
  const std::vector<Word>& path = *cert.witness;
  if (path.empty()) {
    return cert.kind == BarrierKind::strong_barrier &&
           std::any_of(cert.barrier_set.begin(), cert.barrier_set.end(),
                       [&](const Word& b) { return !in_shadow(b, cert.target); });
  }
  if (cert.kind == BarrierKind::barrier && !path.front().is_identity()) return false;
  if (cert.kind == BarrierKind::strong_barrier && in_shadow(path.front(), cert.target)) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (mu.prob(invert(path[i]) * path[i + 1]) <= 0.0) return false;
  }
  for (const Word& w : path)
    if (contains(cert.barrier_set, w)) return false;
  return in_shadow(path.back(), cert.target);
}

std::vector<Word> canonical_power_barrier(const StepMeasure& mu, int generator) {
  if (generator < 1 || generator > mu.rank()) throw PreconditionError("generator index out of range");
  if (!std::all_of(mu.steps().begin(), mu.steps().end(), [](const Step& s) { return s.word.is_power(); })) {
    throw PreconditionError("canonical power barrier needs a powers-of-generators support");
  }
  std::vector<Word> out;
  for (int k = 1; k <= mu.max_range(); ++k) out.push_back(Word::power(generator, k));
  return out;
}

std::vector<double> PVector::lower() const {
  std::vector<double> out;
  for (const FpValue& v : values) out.push_back(v.lower);
  return out;
}

std::vector<double> PVector::upper() const {
  std::vector<double> out;
  for (const FpValue& v : values) out.push_back(v.upper);
  return out;
}

std::vector<double> PVector::mid() const {
  std::vector<double> out;
  for (const FpValue& v : values) out.push_back(v.mid());
  return out;
}

PVector compute_p_vector(const FirstPassageEngine& engine, Letter direction, const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  if (direction.generator < 1 || direction.generator > mu.rank()) throw PreconditionError("generator out of range");
  if (!std::all_of(mu.steps().begin(), mu.steps().end(), [](const Step& s) { return s.word.is_power(); })) {
    throw PreconditionError("p-vector needs a powers-of-generators support");
  }
  const int n = mu.max_range();
  std::vector<Word> B;
  for (int k = 1; k <= n; ++k) B.push_back(Word::power(direction.generator, direction.sign * k));
  PVector p{direction, {}};
  for (int k = 1; k <= n; ++k) {
    p.values.push_back(engine.first_passage(Word(), B[static_cast<std::size_t>(k - 1)],
                                            without(B, B[static_cast<std::size_t>(k - 1)]), opts));
  }
  return p;
}

Matrix BarrierMatrix::lower() const {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries[i].size(); ++j) m(i, j) = entries[i][j].lower;
  return m;
}

Matrix BarrierMatrix::upper() const {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries[i].size(); ++j) m(i, j) = entries[i][j].upper;
  return m;
}

Matrix BarrierMatrix::mid() const {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries[i].size(); ++j) m(i, j) = entries[i][j].mid();
  return m;
}

double BarrierMatrix::max_width() const {
  double w = 0.0;
  for (const auto& row : entries)
    for (const FpValue& v : row) w = std::max(w, v.width());
  return w;
}

BarrierMatrix compute_P_B(const FirstPassageEngine& engine, int generator, std::span<const Word> B,
                          const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  if (generator < 1 || generator > mu.rank()) throw PreconditionError("generator index out of range");
  MeasureClass cls = classify(mu, mu.max_range());
  if (!cls.antisymmetric) throw PreconditionError("P_B needs an antisymmetric walk");
  const Word ai = Word::power(generator, 1);
  BarrierCertificate strong = is_strong_barrier(mu, B, ai);
  if (!strong.verdict) throw PreconditionError("P_B needs a strong a_i-barrier: " + strong.reason);
  BarrierMatrix m;
  m.order.assign(B.begin(), B.end());
  for (const Word& b1 : m.order) {
    std::vector<FpValue> row;
    const Word source = ai * hat(b1);
    for (const Word& b2 : m.order) row.push_back(engine.first_passage(source, b2, without(m.order, b2), opts));
    m.entries.push_back(std::move(row));
  }
  return m;
}

BarrierMatrix compute_crossing_matrix(const FirstPassageEngine& engine, Letter direction, const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  if (!std::all_of(mu.steps().begin(), mu.steps().end(), [](const Step& s) { return s.word.is_power(); })) {
    throw PreconditionError("crossing matrix needs a powers-of-generators support");
  }
  const int n = mu.max_range();
  const int g = direction.generator;
  const int sg = direction.sign;
  BarrierMatrix m;
  for (int k = 1; k <= n; ++k) m.order.push_back(Word::power(g, sg * k));
  for (int j = 1; j <= n; ++j) {
    std::vector<FpValue> row;
    const Word source = Word::power(g, sg * (j - n));
    for (const Word& b : m.order) row.push_back(engine.first_passage(source, b, without(m.order, b), opts));
    m.entries.push_back(std::move(row));
  }
  return m;
}

Lemma6Report lemma6_check(const FirstPassageEngine& engine, const Word& g, std::span<const Word> B,
                          std::span<const Word> B_prime, const Word& x, const FpOptions& opts) {
  const StepMeasure& mu = engine.measure();
  BarrierCertificate strong = is_strong_barrier(mu, B, g);
  if (!strong.verdict) throw PreconditionError("lemma check needs a strong barrier: " + strong.reason);
  if (in_shadow(x, g)) throw PreconditionError("source must lie outside C_fin(g)");
  const std::vector<Word> Bs = sorted_set(B);
  const std::vector<Word> Bp = sorted_set(B_prime);
  if (engine.reaches_shadow(x, g, Bp)) throw PreconditionError("B' does not cut the source off from C_fin(g)");

  Lemma6Report rep;
  rep.pass = true;
  for (const Word& b : Bs) {
    const std::vector<Word> rest = without(Bs, b);
    FpValue lhs = engine.first_passage(x, b, rest, opts);
    double rhs_lo = 0.0, rhs_hi = 0.0;
    for (const Word& bp : Bp) {
      if (contains(rest, bp)) continue;
      FpValue first = engine.first_passage(x, bp, without(Bp, bp), opts);
      FpValue second = engine.first_passage(bp, b, rest, opts);
      rhs_lo += first.lower * second.lower;
      rhs_hi += first.upper * second.upper;
    }
    Lemma6Row row;
    row.b = b;
    row.lhs = lhs.mid();
    row.rhs = 0.5 * (rhs_lo + rhs_hi);
    row.residual = std::abs(row.lhs - row.rhs);
    row.tolerance = 0.5 * (lhs.width() + (rhs_hi - rhs_lo)) + 1e-12;
    rep.max_residual = std::max(rep.max_residual, row.residual);
    rep.pass = rep.pass && row.residual <= row.tolerance;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace fpwalk

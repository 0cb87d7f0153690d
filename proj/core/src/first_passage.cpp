#include "fpwalk/first_passage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>

#include "fpwalk/errors.hpp"

namespace fpwalk {

namespace {

using WordSet = std::unordered_set<Word, WordHash>;

struct Ref {
  enum Kind : std::uint8_t { exit, inner, deep };
  Kind kind;
  int index;
};

struct StepRef {
  double prob;
  Ref ref;
};

// A word of length n+1..2n inside cone c. Its first exit from c is resolved
// through the shorter cone v C_fin(c') containing it: exits of that cone land
// on words `via` that are again exits, inner states or shorter deep nodes.
struct DeepNode {
  int cone;
  int inner;
  std::vector<Ref> via;
};

struct Cone {
  Word root;
  std::vector<Word> inner;
  std::vector<Word> exits;
  std::unordered_map<Word, int, WordHash> inner_index;
  std::unordered_map<Word, int, WordHash> exit_index;
  std::vector<std::vector<StepRef>> steps;
  std::vector<DeepNode> deep;
};

template <class T>
T weight_of(double p) {
  if constexpr (std::is_same_v<T, double>) return p;
  else return p > 0.0 ? 1 : 0;
}

template <class T>
void add_scaled(T w, const T* row, T* acc, int nx) {
  if constexpr (std::is_same_v<T, double>) {
    for (int x = 0; x < nx; ++x) acc[x] += w * row[x];
  } else {
    for (int x = 0; x < nx; ++x) acc[x] |= static_cast<T>(w & row[x]);
  }
}

template <class T>
void add_ref(const Ref& r, T w, const T* kc, const T* dc, T* acc, int nx) {
  switch (r.kind) {
    case Ref::exit:
      if constexpr (std::is_same_v<T, double>) acc[r.index] += w;
      else acc[r.index] |= w;
      break;
    case Ref::inner:
      add_scaled(w, kc + static_cast<std::ptrdiff_t>(r.index) * nx, acc, nx);
      break;
    case Ref::deep:
      add_scaled(w, dc + static_cast<std::ptrdiff_t>(r.index) * nx, acc, nx);
      break;
  }
}

// One application of the kernel map: out = Phi(K).
template <class T>
void kernel_sweep(const std::vector<Cone>& cones, int nx, const std::vector<std::vector<T>>& K,
                  std::vector<std::vector<T>>& out, std::vector<T>& deep_scratch) {
  for (std::size_t c = 0; c < cones.size(); ++c) {
    const Cone& cone = cones[c];
    deep_scratch.assign(cone.deep.size() * static_cast<std::size_t>(nx), T{});
    const T* kc = K[c].data();
    T* dc = deep_scratch.data();
    for (std::size_t d = 0; d < cone.deep.size(); ++d) {
      const DeepNode& node = cone.deep[d];
      const T* krow = K[static_cast<std::size_t>(node.cone)].data() + static_cast<std::ptrdiff_t>(node.inner) * nx;
      T* acc = dc + static_cast<std::ptrdiff_t>(d) * nx;
      for (int x = 0; x < nx; ++x) {
        if (krow[x] != T{}) add_ref(node.via[static_cast<std::size_t>(x)], krow[x], kc, dc, acc, nx);
      }
    }
    std::vector<T>& oc = out[c];
    std::fill(oc.begin(), oc.end(), T{});
    for (std::size_t u = 0; u < cone.steps.size(); ++u) {
      T* acc = oc.data() + static_cast<std::ptrdiff_t>(u) * nx;
      for (const StepRef& s : cone.steps[u]) add_ref(s.ref, weight_of<T>(s.prob), kc, dc, acc, nx);
    }
  }
}

struct ChainState {
  Word word;
  std::int8_t terminal = 0;  // 0 transient, 1 target, 2 dead
  int cone = -1;             // -1 for explicit (core) states
  int inner = -1;
  Word base;
};

struct Chain {
  std::vector<ChainState> states;
  // CSR transitions of transient states.
  std::vector<std::size_t> offset;
  std::vector<int> to;
  std::vector<double> lo;
  std::vector<double> hi;
};

// Terminal rules for a chain query.
struct Terminals {
  std::unordered_map<Word, std::int8_t, WordHash> words;
  std::optional<Word> shadow_root;

  std::int8_t classify(const Word& w) const {
    if (auto it = words.find(w); it != words.end()) return it->second;
    if (shadow_root && in_shadow(w, *shadow_root)) return 1;
    return 0;
  }
};

struct SolveResult {
  double value = 0.0;
  double tail = 0.0;
  int sweeps = 0;
  bool converged = false;
};

}  // namespace

struct FirstPassageEngine::Impl {
  StepMeasure mu;
  int n = 0;
  int nx = 0;
  std::vector<Cone> cones;  // indexed by letter code
  std::vector<std::vector<double>> k_lo;
  std::vector<std::vector<double>> k_hi;
  std::vector<std::vector<std::uint8_t>> k_support;
  KernelStats stats;

  explicit Impl(const StepMeasure& m) : mu(m), n(m.max_range()) {
    build_cones();
    compute_support();
    compute_kernels();
  }

  Ref resolve(int c, const Word& w, const std::map<Word, int>& deep_ids) const {
    const Cone& cone = cones[static_cast<std::size_t>(c)];
    if (!in_shadow(w, cone.root)) {
      auto it = cone.exit_index.find(w);
      if (it == cone.exit_index.end()) throw std::logic_error("cone exit outside B(e, n-1): " + format_word(w));
      return {Ref::exit, it->second};
    }
    if (w.length() <= static_cast<std::size_t>(n)) return {Ref::inner, cone.inner_index.at(w)};
    return {Ref::deep, deep_ids.at(w)};
  }

  void collect_deep(int c, const Word& w, std::set<Word>& found) const {
    if (!found.insert(w).second) return;
    const std::size_t cut = w.length() - static_cast<std::size_t>(n);
    Word v = w.prefix(cut);
    Word tail = w.suffix(cut);
    const Cone& sub = cones[static_cast<std::size_t>(tail.first_letter().code())];
    const Word& root = cones[static_cast<std::size_t>(c)].root;
    for (const Word& x : sub.exits) {
      Word y = v * x;
      if (in_shadow(y, root) && y.length() > static_cast<std::size_t>(n)) collect_deep(c, y, found);
    }
  }

  void build_cones() {
    const int rank = mu.rank();
    const std::vector<Word> near = ball(Word(), n, rank);
    cones.resize(static_cast<std::size_t>(2 * rank));
    for (int c = 0; c < 2 * rank; ++c) {
      Cone& cone = cones[static_cast<std::size_t>(c)];
      cone.root = Word::letter(Letter::from_code(c));
      for (const Word& w : near) {
        if (w.is_identity() || !in_shadow(w, cone.root)) {
          if (w.length() < static_cast<std::size_t>(n)) {
            cone.exit_index.emplace(w, static_cast<int>(cone.exits.size()));
            cone.exits.push_back(w);
          }
        } else {
          cone.inner_index.emplace(w, static_cast<int>(cone.inner.size()));
          cone.inner.push_back(w);
        }
      }
    }
    nx = static_cast<int>(cones[0].exits.size());

    for (int c = 0; c < 2 * rank; ++c) {
      Cone& cone = cones[static_cast<std::size_t>(c)];
      std::set<Word> deep_words;
      for (const Word& u : cone.inner) {
        for (const Step& s : mu.steps()) {
          Word y = u * s.word;
          if (in_shadow(y, cone.root) && y.length() > static_cast<std::size_t>(n)) collect_deep(c, y, deep_words);
        }
      }
      // Shortlex order puts shorter words first, so every deep reference
      // points at an already evaluated node.
      std::map<Word, int> deep_ids;
      for (const Word& w : deep_words) deep_ids.emplace(w, static_cast<int>(deep_ids.size()));

      cone.steps.resize(cone.inner.size());
      for (std::size_t u = 0; u < cone.inner.size(); ++u) {
        for (const Step& s : mu.steps()) {
          cone.steps[u].push_back({s.prob, resolve(c, cone.inner[u] * s.word, deep_ids)});
        }
      }
      for (const Word& w : deep_words) {
        const std::size_t cut = w.length() - static_cast<std::size_t>(n);
        Word v = w.prefix(cut);
        Word tail = w.suffix(cut);
        int sub_code = tail.first_letter().code();
        const Cone& sub = cones[static_cast<std::size_t>(sub_code)];
        DeepNode node{sub_code, sub.inner_index.at(tail), {}};
        for (const Word& x : sub.exits) node.via.push_back(resolve(c, v * x, deep_ids));
        cone.deep.push_back(std::move(node));
      }
      stats.inner_states += cone.inner.size();
      stats.deep_nodes += cone.deep.size();
    }
  }

  template <class T>
  std::vector<std::vector<T>> zero_table() const {
    std::vector<std::vector<T>> t;
    for (const Cone& cone : cones) t.emplace_back(cone.inner.size() * static_cast<std::size_t>(nx), T{});
    return t;
  }

  void compute_support() {
    k_support = zero_table<std::uint8_t>();
    auto next = zero_table<std::uint8_t>();
    std::vector<std::uint8_t> scratch;
    for (;;) {
      kernel_sweep(cones, nx, k_support, next, scratch);
      if (next == k_support) break;
      k_support.swap(next);
    }
  }

  void compute_kernels() {
    constexpr int kMaxIterations = 100000;
    constexpr double kDeltaFloor = 1e-17;
    k_lo = zero_table<double>();
    auto next = zero_table<double>();
    std::vector<double> scratch;
    double prev_delta = 0.0;
    double ratio = 1.0;
    for (int it = 1; it <= kMaxIterations; ++it) {
      kernel_sweep(cones, nx, k_lo, next, scratch);
      double delta = 0.0;
      for (std::size_t c = 0; c < next.size(); ++c)
        for (std::size_t i = 0; i < next[c].size(); ++i) delta = std::max(delta, next[c][i] - k_lo[c][i]);
      k_lo.swap(next);
      stats.iterations = it;
      if (delta == 0.0) {
        stats.tail = 0.0;
        stats.converged = true;
        break;
      }
      if (prev_delta > 0.0) ratio = delta / prev_delta;
      prev_delta = delta;
      if (it >= 3 && ratio < 1.0 && delta <= kDeltaFloor) {
        stats.tail = delta * ratio / (1.0 - ratio);
        stats.converged = true;
        break;
      }
    }
    if (!stats.converged) stats.tail = prev_delta * 1e6;

    k_hi = k_lo;
    for (std::size_t c = 0; c < cones.size(); ++c) {
      for (std::size_t u = 0; u < cones[c].inner.size(); ++u) {
        double sum = 0.0;
        int support = 0;
        for (int x = 0; x < nx; ++x) {
          std::size_t i = u * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x);
          sum += k_lo[c][i];
          support += k_support[c][i];
        }
        if (support == 0) continue;
        double add = std::clamp((1.0 - sum) / support, 0.0, stats.tail);
        for (int x = 0; x < nx; ++x) {
          std::size_t i = u * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x);
          if (k_support[c][i]) k_hi[c][i] += add;
        }
      }
    }
  }

  // Prefix closure of `words` and e, widened by `radius` in the word metric.
  WordSet make_core(const std::vector<Word>& words, int radius) const {
    WordSet core{Word()};
    for (const Word& w : words) {
      for (std::size_t l = 1; l <= w.length(); ++l) core.insert(w.prefix(l));
    }
    if (radius > 0) {
      const std::vector<Letter> letters = alphabet(mu.rank());
      std::vector<Word> frontier(core.begin(), core.end());
      for (int r = 0; r < radius; ++r) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
          for (Letter l : letters) {
            Word y = w * Word::letter(l);
            if (core.insert(y).second) next.push_back(std::move(y));
          }
        }
        frontier = std::move(next);
      }
    }
    return core;
  }

  ChainState locate(const Word& w, const WordSet& core) const {
    ChainState s;
    s.word = w;
    if (core.count(w)) return s;
    std::size_t l = 1;
    while (core.count(w.prefix(l))) ++l;
    s.base = w.prefix(l - 1);
    Word u = w.suffix(l - 1);
    s.cone = u.first_letter().code();
    s.inner = cones[static_cast<std::size_t>(s.cone)].inner_index.at(u);
    return s;
  }

  // Breadth-first construction of every chain state reachable from `source`.
  Chain build_chain(const Word& source, const WordSet& core, const Terminals& terms) const {
    Chain ch;
    std::unordered_map<Word, int, WordHash> ids;
    auto get = [&](const Word& w) {
      auto [it, fresh] = ids.emplace(w, static_cast<int>(ch.states.size()));
      if (fresh) {
        ChainState s = locate(w, core);
        s.terminal = terms.classify(w);
        ch.states.push_back(std::move(s));
      }
      return it->second;
    };
    get(source);
    ch.offset.push_back(0);
    for (std::size_t i = 0; i < ch.states.size(); ++i) {
      if (ch.states[i].terminal == 0) {
        if (ch.states[i].cone < 0) {
          const Word w = ch.states[i].word;
          for (const Step& s : mu.steps()) {
            int t = get(w * s.word);
            ch.to.push_back(t);
            ch.lo.push_back(s.prob);
            ch.hi.push_back(s.prob);
          }
        } else {
          const std::size_t c = static_cast<std::size_t>(ch.states[i].cone);
          const std::size_t row = static_cast<std::size_t>(ch.states[i].inner) * static_cast<std::size_t>(nx);
          const Word base = ch.states[i].base;
          for (int x = 0; x < nx; ++x) {
            if (!k_support[c][row + static_cast<std::size_t>(x)]) continue;
            int t = get(base * cones[c].exits[static_cast<std::size_t>(x)]);
            ch.to.push_back(t);
            ch.lo.push_back(k_lo[c][row + static_cast<std::size_t>(x)]);
            ch.hi.push_back(k_hi[c][row + static_cast<std::size_t>(x)]);
          }
        }
      }
      ch.offset.push_back(ch.to.size());
    }
    return ch;
  }

  // Index of the first target state met by breadth-first search, or -1.
  static int first_target(const Chain& ch) {
    std::vector<char> seen(ch.states.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
      int s = queue.front();
      queue.pop_front();
      if (ch.states[static_cast<std::size_t>(s)].terminal == 1) return s;
      for (std::size_t e = ch.offset[static_cast<std::size_t>(s)]; e < ch.offset[static_cast<std::size_t>(s) + 1]; ++e) {
        int t = ch.to[e];
        if (!seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          queue.push_back(t);
        }
      }
    }
    return -1;
  }

  // Jacobi value iteration from zero for the probability of reaching a target
  // state. Stops when the geometric tail estimate drops below tol * value.
  static SolveResult solve(const Chain& ch, const std::vector<double>& prob, double tol, int max_sweeps) {
    const std::size_t N = ch.states.size();
    std::vector<double> u(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) u[i] = ch.states[i].terminal == 1 ? 1.0 : 0.0;
    std::vector<double> next = u;
    SolveResult res;
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    for (int t = 1; t <= max_sweeps; ++t) {
      double delta = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if (ch.states[i].terminal != 0) continue;
        double acc = 0.0;
        for (std::size_t e = ch.offset[i]; e < ch.offset[i + 1]; ++e) acc += prob[e] * u[static_cast<std::size_t>(ch.to[e])];
        delta = std::max(delta, acc - u[i]);
        next[i] = acc;
      }
      u.swap(next);
      res.sweeps = t;
      d3 = d2;
      d2 = d1;
      d1 = delta;
      if (delta <= 0.0) {
        res.converged = true;
        res.tail = 0.0;
        break;
      }
      if (t >= 4 && d2 > 0.0 && d3 > 0.0) {
        double r = std::max(d1 / d2, d2 / d3);
        if (r < 1.0) {
          double tail = delta * r / (1.0 - r);
          if (u[0] > 0.0 && tail <= tol * u[0]) {
            res.converged = true;
            res.tail = tail;
            break;
          }
        }
      }
    }
    res.value = u[0];
    if (!res.converged) res.tail = 1.0;
    return res;
  }

  FpValue solve_hitting(const Word& source, const Terminals& terms, const std::vector<Word>& hull_words,
                        const FpOptions& opts) const {
    FpValue out;
    out.radius_used = opts.core_radius;
    if (std::int8_t t = terms.classify(source); t != 0) {
      out.lower = out.upper = (t == 1) ? 1.0 : 0.0;
      out.converged = true;
      return out;
    }
    WordSet core = make_core(hull_words, opts.core_radius);
    Chain ch = build_chain(source, core, terms);
    if (first_target(ch) < 0) {
      out.lower = out.upper = 0.0;
      out.converged = true;
      return out;
    }
    SolveResult lo = solve(ch, ch.lo, opts.tol, opts.max_sweeps);
    SolveResult hi = solve(ch, ch.hi, opts.tol, opts.max_sweeps);
    out.lower = std::clamp(lo.value, 0.0, 1.0);
    out.upper = std::clamp(std::max(hi.value + hi.tail, lo.value + lo.tail), out.lower, 1.0);
    out.iterations = lo.sweeps;
    out.converged = lo.converged && hi.converged && stats.converged;
    return out;
  }
};

FirstPassageEngine::FirstPassageEngine(const StepMeasure& mu) : impl_(std::make_shared<const Impl>(mu)) {}
FirstPassageEngine::~FirstPassageEngine() = default;
FirstPassageEngine::FirstPassageEngine(const FirstPassageEngine&) = default;
FirstPassageEngine& FirstPassageEngine::operator=(const FirstPassageEngine&) = default;
FirstPassageEngine::FirstPassageEngine(FirstPassageEngine&&) noexcept = default;
FirstPassageEngine& FirstPassageEngine::operator=(FirstPassageEngine&&) noexcept = default;

const StepMeasure& FirstPassageEngine::measure() const { return impl_->mu; }
const KernelStats& FirstPassageEngine::kernel_stats() const { return impl_->stats; }

namespace {

void check_rank(const Word& w, int rank) {
  if (w.max_generator() > rank) throw PreconditionError("word " + format_word(w) + " exceeds rank");
}

}  // namespace

FpValue FirstPassageEngine::first_passage(const Word& x, const Word& y, std::span<const Word> avoid,
                                          const FpOptions& opts) const {
  if (!(opts.tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (opts.core_radius < 0) throw PreconditionError("core radius must be nonnegative");
  const int rank = impl_->mu.rank();
  check_rank(x, rank);
  check_rank(y, rank);
  if (std::find(avoid.begin(), avoid.end(), y) != avoid.end()) {
    throw PreconditionError("target " + format_word(y) + " lies in the avoid set");
  }
  // Work in the frame of x so that the result is exactly left-invariant.
  const Word xi = invert(x);
  Terminals terms;
  std::vector<Word> hull{xi * y};
  for (const Word& s : avoid) {
    check_rank(s, rank);
    Word t = xi * s;
    terms.words.emplace(t, 2);
    hull.push_back(std::move(t));
  }
  terms.words[hull.front()] = 1;
  return impl_->solve_hitting(Word(), terms, hull, opts);
}

FpValue FirstPassageEngine::escape_probability(const Word& x, std::span<const Word> A, const FpOptions& opts) const {
  if (std::find(A.begin(), A.end(), x) != A.end()) throw PreconditionError("escape source lies in the set");
  std::vector<Word> set(A.begin(), A.end());
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  FpValue out;
  out.lower = out.upper = 1.0;
  out.converged = true;
  out.radius_used = opts.core_radius;
  double sum_lo = 0.0, sum_hi = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::vector<Word> rest;
    for (std::size_t j = 0; j < set.size(); ++j)
      if (j != i) rest.push_back(set[j]);
    FpValue f = first_passage(x, set[i], rest, opts);
    sum_lo += f.lower;
    sum_hi += f.upper;
    out.iterations += f.iterations;
    out.converged = out.converged && f.converged;
  }
  out.lower = std::clamp(1.0 - sum_hi, 0.0, 1.0);
  out.upper = std::clamp(1.0 - sum_lo, out.lower, 1.0);
  return out;
}

FpValue FirstPassageEngine::chained_passage(const Word& x, const std::vector<std::vector<Word>>& chain,
                                            const FpOptions& opts) const {
  if (chain.empty()) throw PreconditionError("chained passage needs at least one set");
  std::vector<std::vector<Word>> sets;
  for (const auto& A : chain) {
    std::vector<Word> s = A;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }
  for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
    for (const Word& w : sets[i]) {
      if (std::binary_search(sets[i + 1].begin(), sets[i + 1].end(), w)) {
        throw PreconditionError("consecutive sets of the chain overlap at " + format_word(w));
      }
    }
  }
  if (std::binary_search(sets[0].begin(), sets[0].end(), x)) throw PreconditionError("chain source lies in A_1");

  // Distinct sets share first-passage rows.
  std::vector<int> set_id(sets.size());
  std::vector<std::vector<Word>> distinct;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto it = std::find(distinct.begin(), distinct.end(), sets[i]);
    if (it == distinct.end()) {
      set_id[i] = static_cast<int>(distinct.size());
      distinct.push_back(sets[i]);
    } else {
      set_id[i] = static_cast<int>(it - distinct.begin());
    }
  }
  std::map<std::pair<int, Word>, std::vector<FpValue>> rows;
  int iterations = 0;
  bool converged = true;
  auto row = [&](int id, const Word& from) -> const std::vector<FpValue>& {
    auto key = std::make_pair(id, from);
    if (auto it = rows.find(key); it != rows.end()) return it->second;
    const std::vector<Word>& A = distinct[static_cast<std::size_t>(id)];
    std::vector<FpValue> r;
    for (std::size_t i = 0; i < A.size(); ++i) {
      std::vector<Word> rest;
      for (std::size_t j = 0; j < A.size(); ++j)
        if (j != i) rest.push_back(A[j]);
      FpValue f = first_passage(from, A[i], rest, opts);
      iterations += f.iterations;
      converged = converged && f.converged;
      r.push_back(f);
    }
    return rows.emplace(key, std::move(r)).first->second;
  };

  std::map<std::pair<std::size_t, Word>, Interval> memo;
  std::function<Interval(std::size_t, const Word&)> rec = [&](std::size_t level, const Word& from) -> Interval {
    auto key = std::make_pair(level, from);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::vector<FpValue>& r = row(set_id[level], from);
    Interval v;
    if (level + 1 == sets.size()) {
      double lo = 0.0, hi = 0.0;
      for (const FpValue& f : r) {
        lo += f.lower;
        hi += f.upper;
      }
      v = {std::clamp(1.0 - hi, 0.0, 1.0), std::clamp(1.0 - lo, 0.0, 1.0)};
    } else {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].upper == 0.0) continue;
        Interval next = rec(level + 1, sets[level][i]);
        v.lower += r[i].lower * next.lower;
        v.upper += r[i].upper * next.upper;
      }
      v.upper = std::min(v.upper, 1.0);
    }
    memo.emplace(key, v);
    return v;
  };
  Interval v = rec(0, x);
  FpValue out;
  out.lower = v.lower;
  out.upper = std::max(v.upper, v.lower);
  out.iterations = iterations;
  out.radius_used = opts.core_radius;
  out.converged = converged;
  return out;
}

bool FirstPassageEngine::reachable(const Word& x, const Word& y, std::span<const Word> avoid) const {
  if (std::find(avoid.begin(), avoid.end(), y) != avoid.end()) return false;
  const Word xi = invert(x);
  Terminals terms;
  std::vector<Word> hull{xi * y};
  for (const Word& s : avoid) {
    Word t = xi * s;
    terms.words.emplace(t, 2);
    hull.push_back(std::move(t));
  }
  terms.words[hull.front()] = 1;
  if (std::int8_t t = terms.classify(Word()); t != 0) return t == 1;
  WordSet core = impl_->make_core(hull, 0);
  return Impl::first_target(impl_->build_chain(Word(), core, terms)) >= 0;
}

std::optional<Word> FirstPassageEngine::reaches_shadow(const Word& x, const Word& g, std::span<const Word> blocked,
                                                       int core_radius) const {
  if (g.is_identity()) throw PreconditionError("shadow root must not be the identity");
  Terminals terms;
  terms.shadow_root = g;
  std::vector<Word> hull{x, g};
  for (const Word& b : blocked) {
    terms.words.emplace(b, 2);
    hull.push_back(b);
  }
  std::int8_t t = terms.classify(x);
  if (t == 1) return x;
  if (t == 2) return std::nullopt;
  WordSet core = impl_->make_core(hull, core_radius);
  Chain ch = impl_->build_chain(x, core, terms);
  int s = Impl::first_target(ch);
  if (s < 0) return std::nullopt;
  return ch.states[static_cast<std::size_t>(s)].word;
}

FpValue first_passage(const StepMeasure& mu, const Word& x, const Word& y, std::span<const Word> avoid, double tol) {
  FpOptions opts;
  opts.tol = tol;
  return FirstPassageEngine(mu).first_passage(x, y, avoid, opts);
}

FpValue truncated_first_passage(const StepMeasure& mu, const Word& x, const Word& y, std::span<const Word> avoid,
                                int radius, double sweep_tol) {
  if (radius < 0) throw PreconditionError("radius must be nonnegative");
  if (std::find(avoid.begin(), avoid.end(), y) != avoid.end()) throw PreconditionError("target lies in the avoid set");
  FpValue out;
  out.radius_used = radius;
  if (x == y) {
    out.lower = out.upper = 1.0;
    out.converged = true;
    return out;
  }
  if (std::find(avoid.begin(), avoid.end(), x) != avoid.end()) {
    out.lower = out.upper = 0.0;
    out.converged = true;
    return out;
  }
  // Prefix-closed hull of the query words, widened to radius.
  WordSet states;
  std::vector<Word> hull{x, y};
  hull.insert(hull.end(), avoid.begin(), avoid.end());
  std::vector<Word> frontier{Word()};
  states.insert(Word());
  for (const Word& w : hull) {
    for (std::size_t l = 1; l <= w.length(); ++l) {
      Word p = w.prefix(l);
      if (states.insert(p).second) frontier.push_back(p);
    }
  }
  frontier.assign(states.begin(), states.end());
  const std::vector<Letter> letters = alphabet(mu.rank());
  for (int r = 0; r < radius; ++r) {
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (Letter l : letters) {
        Word z = w * Word::letter(l);
        if (states.insert(z).second) next.push_back(std::move(z));
      }
    frontier = std::move(next);
  }
  std::vector<Word> order(states.begin(), states.end());
  std::sort(order.begin(), order.end());
  std::unordered_map<Word, int, WordHash> index;
  for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i], static_cast<int>(i));
  const std::size_t N = order.size();
  std::vector<std::int8_t> kind(N, 0);
  for (const Word& s : avoid) kind[static_cast<std::size_t>(index.at(s))] = 2;
  kind[static_cast<std::size_t>(index.at(y))] = 1;
  std::vector<int> to;
  std::vector<std::size_t> off{0};
  for (std::size_t i = 0; i < N; ++i) {
    if (kind[i] == 0) {
      for (const Step& s : mu.steps()) {
        auto it = index.find(order[i] * s.word);
        to.push_back(it == index.end() ? -1 : it->second);
      }
    }
    off.push_back(to.size());
  }
  std::vector<double> u(N, 0.0), next(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) u[i] = next[i] = kind[i] == 1 ? 1.0 : 0.0;
  const std::size_t src = static_cast<std::size_t>(index.at(x));
  double prev = 0.0;
  double ratio = 1.0;
  for (int t = 1; t <= 1'000'000; ++t) {
    double delta = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (kind[i] != 0) continue;
      double acc = 0.0;
      std::size_t k = 0;
      for (std::size_t e = off[i]; e < off[i + 1]; ++e, ++k) {
        if (to[e] >= 0) acc += mu.steps()[k].prob * u[static_cast<std::size_t>(to[e])];
      }
      delta = std::max(delta, acc - u[i]);
      next[i] = acc;
    }
    u.swap(next);
    out.iterations = t;
    if (prev > 0.0) ratio = delta / prev;
    prev = delta;
    if (delta < sweep_tol && t > 2) {
      out.converged = true;
      break;
    }
  }
  out.lower = u[src];
  double tail = (ratio < 1.0) ? prev * ratio / (1.0 - ratio) : 1.0;
  out.upper = std::min(1.0, out.lower + tail);
  return out;
}

std::map<Letter, double> nn_exact_first_passage(const StepMeasure& mu) {
  if (mu.max_range() != 1) throw PreconditionError("nearest-neighbour oracle needs range 1");
  const std::vector<Letter> letters = alphabet(mu.rank());
  const std::size_t L = letters.size();
  std::vector<double> p(L), f(L, 0.0), next(L);
  for (std::size_t i = 0; i < L; ++i) p[i] = mu.prob(Word::letter(letters[i]));
  for (int it = 0; it < 10'000'000; ++it) {
    double delta = 0.0;
    for (std::size_t s = 0; s < L; ++s) {
      double acc = p[s];
      for (std::size_t t = 0; t < L; ++t) {
        if (t == s) continue;
        acc += p[t] * f[static_cast<std::size_t>(letters[t].inverse().code())] * f[s];
      }
      delta = std::max(delta, std::abs(acc - f[s]));
      next[s] = acc;
    }
    f.swap(next);
    if (delta < 1e-17) break;
  }
  std::map<Letter, double> out;
  for (std::size_t i = 0; i < L; ++i) out[letters[i]] = f[i];
  return out;
}

RatioSequence fp_ratio_sequence(const FirstPassageEngine& engine, Letter direction, int k_max, const FpOptions& opts) {
  if (k_max < 1) throw PreconditionError("k_max must be at least 1");
  RatioSequence out;
  out.direction = direction;
  for (int k = 1; k <= k_max; ++k) {
    Word target = Word::power(direction.generator, direction.sign * k);
    FpValue f = engine.first_passage(Word(), target, {}, opts);
    out.all_converged = out.all_converged && f.converged;
    if (k >= 2) {
      const FpValue& prev = out.values.back();
      Interval r;
      r.lower = prev.upper > 0.0 ? f.lower / prev.upper : 0.0;
      r.upper = prev.lower > 0.0 ? f.upper / prev.lower : std::numeric_limits<double>::infinity();
      out.ratios.push_back(r);
    }
    out.values.push_back(f);
  }
  return out;
}

}  // namespace fpwalk

#include "fpwalk/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fpwalk/errors.hpp"
#include "fpwalk/parallel.hpp"

namespace fpwalk {

namespace {

constexpr std::uint64_t kBlock = 4096;

using Codes = std::vector<std::uint8_t>;

Codes codes_of(const Word& w) {
  Codes out;
  for (const Letter& l : w.letters()) out.push_back(static_cast<std::uint8_t>(l.code()));
  return out;
}

class Sampler {
 public:
  explicit Sampler(const StepMeasure& mu) {
    double acc = 0.0;
    for (const Step& s : mu.steps()) {
      acc += s.prob;
      cum_.push_back(acc);
      steps_.push_back(codes_of(s.word));
    }
  }
  const Codes& draw(std::mt19937_64& rng) const {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cum_.back();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    return steps_[std::min(i, steps_.size() - 1)];
  }

 private:
  std::vector<double> cum_;
  std::vector<Codes> steps_;
};

// Walker position as a letter stack, with the common-prefix length against
// each tracked word kept up to date.
class Walker {
 public:
  explicit Walker(const std::vector<Codes>& tracked) : tracked_(tracked), match_(tracked.size(), 0) {}

  void reset(const Codes& start) {
    stack_.clear();
    std::fill(match_.begin(), match_.end(), 0);
    for (std::uint8_t c : start) apply(c);
  }
  void step(const Codes& s) {
    for (std::uint8_t c : s) apply(c);
  }
  std::size_t length() const { return stack_.size(); }
  bool at(std::size_t t) const { return match_[t] == stack_.size() && match_[t] == tracked_[t].size(); }
  bool below(std::size_t t) const { return match_[t] == tracked_[t].size(); }
  std::size_t distance_to(std::size_t t) const { return stack_.size() + tracked_[t].size() - 2 * match_[t]; }

 private:
  void apply(std::uint8_t c) {
    const std::size_t len = stack_.size();
    if (len > 0 && stack_.back() == (c ^ 1u)) {
      stack_.pop_back();
      for (std::size_t& m : match_)
        if (m == len) --m;
    } else {
      for (std::size_t t = 0; t < match_.size(); ++t)
        if (match_[t] == len && len < tracked_[t].size() && tracked_[t][len] == c) ++match_[t];
      stack_.push_back(c);
    }
  }

  const std::vector<Codes>& tracked_;
  Codes stack_;
  std::vector<std::size_t> match_;
};

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

McEstimate make_estimate(std::uint64_t hits, const McOptions& opts) {
  McEstimate e;
  e.n_samples = opts.samples;
  e.cutoff_steps = opts.cutoff_steps;
  e.seed = opts.seed;
  e.mean = static_cast<double>(hits) / static_cast<double>(opts.samples);
  e.std_err = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(opts.samples));
  return e;
}

void check_options(const McOptions& opts) {
  if (opts.samples < 1) throw PreconditionError("n_samples must be at least 1");
  if (opts.cutoff_steps < 1) throw PreconditionError("cutoff_steps must be at least 1");
}

}  // namespace

McEstimate estimate_first_passage(const StepMeasure& mu, const Word& x, const Word& y, std::span<const Word> avoid,
                                  const McOptions& opts) {
  check_options(opts);
  if (std::find(avoid.begin(), avoid.end(), y) != avoid.end()) throw PreconditionError("target lies in the avoid set");
  std::vector<Codes> tracked{codes_of(y)};
  for (const Word& w : avoid) tracked.push_back(codes_of(w));
  const Codes start = codes_of(x);
  const std::size_t escape = distance(x, y) + static_cast<std::size_t>(std::max(opts.escape_margin, 1));
  const bool start_hits = x == y;
  const bool start_blocked = !start_hits && std::find(avoid.begin(), avoid.end(), x) != avoid.end();
  Sampler sampler(mu);

  struct Counts {
    std::uint64_t hits = 0, truncated = 0, escaped = 0;
  };
  const std::uint64_t blocks = (opts.samples + kBlock - 1) / kBlock;
  std::vector<Counts> counts(blocks);
  parallel_for(blocks, opts.threads > 0 ? opts.threads : default_threads(), [&](std::size_t b) {
    std::mt19937_64 rng = block_rng(opts.seed, b);
    Walker w(tracked);
    Counts c;
    const std::uint64_t end = std::min<std::uint64_t>(opts.samples, (b + 1) * kBlock);
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      if (start_hits) {
        ++c.hits;
        continue;
      }
      if (start_blocked) continue;
      w.reset(start);
      bool done = false;
      for (std::int64_t t = 0; t < opts.cutoff_steps && !done; ++t) {
        w.step(sampler.draw(rng));
        if (w.at(0)) {
          ++c.hits;
          done = true;
          break;
        }
        for (std::size_t a = 1; a < tracked.size(); ++a)
          if (w.at(a)) done = true;
        if (!done && w.distance_to(0) > escape) {
          ++c.escaped;
          done = true;
        }
      }
      if (!done) ++c.truncated;
    }
    counts[b] = c;
  });
  Counts total;
  for (const Counts& c : counts) {
    total.hits += c.hits;
    total.truncated += c.truncated;
    total.escaped += c.escaped;
  }
  McEstimate e = make_estimate(total.hits, opts);
  e.truncated_fraction = static_cast<double>(total.truncated) / static_cast<double>(opts.samples);
  e.escaped_fraction = static_cast<double>(total.escaped) / static_cast<double>(opts.samples);
  return e;
}

int default_cylinder_threshold(const StepMeasure& mu, std::span<const Word> roots) {
  std::size_t longest = 0;
  for (const Word& g : roots) longest = std::max(longest, g.length());
  return std::max<int>(40, static_cast<int>(longest) + 2 * mu.max_range());
}

std::vector<CylinderEstimate> estimate_cylinders(const StepMeasure& mu, std::span<const Word> roots,
                                                 int distance_threshold, const McOptions& opts) {
  check_options(opts);
  std::vector<Codes> tracked;
  for (const Word& g : roots) {
    if (g.is_identity()) throw PreconditionError("cylinder root must not be the identity");
    if (static_cast<std::size_t>(distance_threshold) < g.length() + 2 * static_cast<std::size_t>(mu.max_range())) {
      throw PreconditionError("distance_threshold must be at least |g| + 2 max_range for " + format_word(g));
    }
    tracked.push_back(codes_of(g));
  }
  const std::size_t far = 2 * static_cast<std::size_t>(distance_threshold);
  const std::size_t k = roots.size();
  Sampler sampler(mu);

  struct Counts {
    std::vector<std::uint64_t> near, far;
    std::uint64_t truncated_near = 0, truncated_far = 0;
  };
  const std::uint64_t blocks = (opts.samples + kBlock - 1) / kBlock;
  std::vector<Counts> counts(blocks);
  parallel_for(blocks, opts.threads > 0 ? opts.threads : default_threads(), [&](std::size_t b) {
    std::mt19937_64 rng = block_rng(opts.seed, b);
    Walker w(tracked);
    Counts c;
    c.near.assign(k, 0);
    c.far.assign(k, 0);
    const std::uint64_t end = std::min<std::uint64_t>(opts.samples, (b + 1) * kBlock);
    const Codes origin;
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      w.reset(origin);
      std::int64_t t = 0;
      for (; t < opts.cutoff_steps && w.length() < static_cast<std::size_t>(distance_threshold); ++t)
        w.step(sampler.draw(rng));
      if (w.length() < static_cast<std::size_t>(distance_threshold)) {
        ++c.truncated_near;
        ++c.truncated_far;
        continue;
      }
      for (std::size_t g = 0; g < k; ++g)
        if (w.below(g)) ++c.near[g];
      for (; t < opts.cutoff_steps && w.length() < far; ++t) w.step(sampler.draw(rng));
      if (w.length() < far) {
        ++c.truncated_far;
        continue;
      }
      for (std::size_t g = 0; g < k; ++g)
        if (w.below(g)) ++c.far[g];
    }
    counts[b] = std::move(c);
  });
  std::vector<std::uint64_t> near(k, 0), farc(k, 0);
  std::uint64_t tn = 0, tf = 0;
  for (const Counts& c : counts) {
    for (std::size_t g = 0; g < k; ++g) {
      near[g] += c.near[g];
      farc[g] += c.far[g];
    }
    tn += c.truncated_near;
    tf += c.truncated_far;
  }
  std::vector<CylinderEstimate> out;
  for (std::size_t g = 0; g < k; ++g) {
    CylinderEstimate ce;
    ce.root = roots[g];
    ce.at_threshold = make_estimate(near[g], opts);
    ce.at_threshold.truncated_fraction = static_cast<double>(tn) / static_cast<double>(opts.samples);
    ce.at_double = make_estimate(farc[g], opts);
    ce.at_double.truncated_fraction = static_cast<double>(tf) / static_cast<double>(opts.samples);
    double se = std::hypot(ce.at_threshold.std_err, ce.at_double.std_err);
    double d = std::abs(ce.at_double.mean - ce.at_threshold.mean);
    ce.drift_sigma = se > 0.0 ? d / se : (d > 0.0 ? INFINITY : 0.0);
    out.push_back(std::move(ce));
  }
  return out;
}

CylinderEstimate estimate_cylinder(const StepMeasure& mu, const Word& root, int distance_threshold,
                                   const McOptions& opts) {
  return estimate_cylinders(mu, std::span<const Word>(&root, 1), distance_threshold, opts).front();
}

}  // namespace fpwalk

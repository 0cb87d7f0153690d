#include "fpwalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fpwalk/errors.hpp"
#include "fpwalk/first_passage.hpp"
#include "fpwalk/numeric.hpp"

namespace fpwalk {

StepMeasure::StepMeasure(int rank, std::vector<Step> steps) : rank_(rank), steps_(std::move(steps)) {
  if (rank_ < 2) throw ConfigError("rank must be at least 2, got " + std::to_string(rank_));
  if (steps_.empty()) throw ConfigError("measure has empty support");
  std::sort(steps_.begin(), steps_.end(), [](const Step& a, const Step& b) { return a.word < b.word; });
  double total = 0.0;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const Step& s = steps_[i];
    if (s.word.is_identity()) throw ConfigError("identity word in support");
    if (s.word.max_generator() > rank_) {
      throw ConfigError("support word " + format_word(s.word) + " exceeds rank " + std::to_string(rank_));
    }
    if (!(s.prob > 0.0) || s.prob > 1.0 || !std::isfinite(s.prob)) {
      throw ConfigError("probability of " + format_word(s.word) + " must lie in (0, 1]");
    }
    if (i > 0 && steps_[i - 1].word == s.word) throw ConfigError("duplicate support word " + format_word(s.word));
    total += s.prob;
    max_range_ = std::max(max_range_, static_cast<int>(s.word.length()));
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ConfigError("probabilities sum to " + format_double(total) + ", expected 1");
  }
}

double StepMeasure::prob(const Word& w) const {
  auto it = std::lower_bound(steps_.begin(), steps_.end(), w,
                             [](const Step& s, const Word& x) { return s.word < x; });
  return (it != steps_.end() && it->word == w) ? it->prob : 0.0;
}

std::string StepMeasure::canonical_string() const {
  std::string out = std::to_string(rank_);
  for (const Step& s : steps_) {
    out += '|';
    out += format_word(s.word);
    out += ':';
    out += format_double(s.prob);
  }
  return out;
}

StepMeasure load_measure(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  if (!doc.contains("rank") || !doc["rank"].is_number_integer()) throw ParseError("config needs integer 'rank'");
  if (!doc.contains("measure") || !doc["measure"].is_array()) throw ParseError("config needs array 'measure'");
  int rank = doc["rank"].get<int>();
  if (rank < 2) throw ConfigError("rank must be at least 2");

  std::vector<Step> steps;
  for (const auto& entry : doc["measure"]) {
    if (!entry.is_object() || !entry.contains("word") || !entry["word"].is_string() || !entry.contains("prob") ||
        !entry["prob"].is_number()) {
      throw ParseError("measure entries need a string 'word' and numeric 'prob'");
    }
    std::string text = entry["word"].get<std::string>();
    Word w = parse_word(text, rank);
    if (w.length() != parse_unreduced_length(text, rank)) {
      throw ConfigError("support word '" + text + "' is not reduced");
    }
    steps.push_back({std::move(w), entry["prob"].get<double>()});
  }
  return StepMeasure(rank, std::move(steps));
}

std::string measure_to_json(const StepMeasure& mu) {
  nlohmann::json doc;
  doc["rank"] = mu.rank();
  doc["measure"] = nlohmann::json::array();
  for (const Step& s : mu.steps()) doc["measure"].push_back({{"word", format_word(s.word)}, {"prob", s.prob}});
  return doc.dump(2);
}

StepMeasure pushforward(const StepMeasure& mu, std::span<const Word> images) {
  if (images.size() != static_cast<std::size_t>(mu.rank())) {
    throw PreconditionError("pushforward needs one image per generator");
  }
  std::map<Word, double> mass;
  for (const Step& s : mu.steps()) {
    Word img = apply_endomorphism(images, s.word);
    if (img.is_identity()) throw ConfigError("image of " + format_word(s.word) + " is the identity");
    mass[img] += s.prob;
  }
  std::vector<Step> steps;
  for (auto& [w, p] : mass) steps.push_back({w, p});
  return StepMeasure(mu.rank(), std::move(steps));
}

std::string to_string(Admissibility a) {
  switch (a) {
    case Admissibility::verified: return "verified";
    case Admissibility::failed: return "failed";
    case Admissibility::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int default_search_radius(const StepMeasure& mu) { return 3 * mu.max_range() + 3; }

MeasureClass classify(const StepMeasure& mu, int search_radius) {
  if (search_radius < mu.max_range()) {
    throw PreconditionError("search radius " + std::to_string(search_radius) + " below range " +
                            std::to_string(mu.max_range()));
  }
  MeasureClass out;
  auto close = [](double a, double b) { return std::abs(a - b) <= StepMeasure::kSumTolerance; };
  out.symmetric = std::all_of(mu.steps().begin(), mu.steps().end(),
                              [&](const Step& s) { return close(s.prob, mu.prob(invert(s.word))); });
  out.antisymmetric = std::all_of(mu.steps().begin(), mu.steps().end(),
                                  [&](const Step& s) { return close(s.prob, mu.prob(hat(s.word))); });
  out.powers_of_generators =
      std::all_of(mu.steps().begin(), mu.steps().end(), [](const Step& s) { return s.word.is_power(); });

  // Semigroup closure from e inside B(e, search_radius).
  std::unordered_set<Word, WordHash> seen{Word()};
  std::deque<Word> queue{Word()};
  while (!queue.empty()) {
    Word w = std::move(queue.front());
    queue.pop_front();
    for (const Step& s : mu.steps()) {
      Word next = w * s.word;
      if (next.length() > static_cast<std::size_t>(search_radius)) continue;
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  std::vector<Letter> missing;
  for (Letter l : alphabet(mu.rank())) {
    if (!seen.count(Word::letter(l))) missing.push_back(l);
  }
  if (missing.empty()) {
    out.admissible = Admissibility::verified;
    out.admissibility_method = "closure";
    return out;
  }
  out.admissibility_method = "cone-reachability";
  FirstPassageEngine engine(mu);
  bool all = std::all_of(missing.begin(), missing.end(),
                         [&](Letter l) { return engine.reachable(Word(), Word::letter(l), {}); });
  out.admissible = all ? Admissibility::verified : Admissibility::failed;
  return out;
}

}  // namespace fpwalk

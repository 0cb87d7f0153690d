#include "fpwalk/presets.hpp"

#include <utility>

#include "fpwalk/errors.hpp"

namespace fpwalk {

namespace {

struct PresetSpec {
  const char* name;
  std::vector<std::pair<const char*, double>> entries;
};

const std::vector<PresetSpec>& specs() {
  static const std::vector<PresetSpec> table = {
      {"nn-uniform-f2", {{"a1", 0.25}, {"a1^-1", 0.25}, {"a2", 0.25}, {"a2^-1", 0.25}}},
      {"powers-n2-f2",
       {{"a1", 0.125},
        {"a1^-1", 0.125},
        {"a1^2", 0.125},
        {"a1^-2", 0.125},
        {"a2", 0.125},
        {"a2^-1", 0.125},
        {"a2^2", 0.125},
        {"a2^-2", 0.125}}},
      {"example-2.8", {{"a1", 0.25}, {"a1^-1", 0.25}, {"a1 a2", 0.25}, {"a2^-1 a1^-1", 0.25}}},
      {"example-4.1-antisym",
       {{"a1", 1.0 / 6},
        {"a1^-1", 1.0 / 6},
        {"a2", 1.0 / 6},
        {"a2^-1", 1.0 / 6},
        {"a1 a2", 1.0 / 6},
        {"a1^-1 a2^-1", 1.0 / 6}}},
      {"example-4.2-symmetric", {{"a1", 0.25}, {"a1^-1", 0.25}, {"a1 a2", 0.25}, {"a2^-1 a1^-1", 0.25}}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const PresetSpec& s : specs()) out.emplace_back(s.name);
    return out;
  }();
  return names;
}

std::optional<StepMeasure> find_preset(std::string_view name) {
  for (const PresetSpec& s : specs()) {
    if (name != s.name) continue;
    std::vector<Step> steps;
    for (const auto& [word, p] : s.entries) steps.push_back({parse_word(word, 2), p});
    return StepMeasure(2, std::move(steps));
  }
  return std::nullopt;
}

StepMeasure preset(std::string_view name) {
  if (auto mu = find_preset(name)) return *std::move(mu);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace fpwalk

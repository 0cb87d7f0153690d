#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpwalk/measure.hpp"

namespace fpwalk {

/// Names of the built-in walks, in a fixed order.
const std::vector<std::string>& preset_names();

/// Built-in walk by name, or nullopt if the name is unknown.
std::optional<StepMeasure> find_preset(std::string_view name);

/// Built-in walk by name; throws ConfigError if the name is unknown.
StepMeasure preset(std::string_view name);

}  // namespace fpwalk

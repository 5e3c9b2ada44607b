#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rydsim/scenario.hpp"

// Scenario files are JSON objects with one nested object per section
// ("source", "medium", "storage", ...). Every field is optional and falls
// back to the built-in default; unknown keys are rejected.
namespace rydsim::config {

/// Parses a scenario. Throws ConfigError with one diagnostic per bad field
/// (syntax, unknown key, wrong type, failed validation).
ScenarioConfig parse(std::string_view text);

/// Canonical serialisation: every field, fixed key order, two-space indent,
/// trailing newline. parse(serialize(c)) == c field by field.
std::string serialize(const ScenarioConfig& cfg);

/// Hash of the canonical serialisation (16 hex digits).
std::string scenario_hash(const ScenarioConfig& cfg);

/// Dotted paths of every numeric field, e.g. "source.p", "timing.t_b_us".
std::vector<std::string> numeric_paths();

/// Assigns a numeric field by dotted path. Throws std::invalid_argument for
/// unknown paths or non-integral values on integer fields.
void set_path(ScenarioConfig& cfg, std::string_view path, double value);
double get_path(const ScenarioConfig& cfg, std::string_view path);

/// Copy of `cfg` with the sweep variable set to `value` and the sweep cleared.
ScenarioConfig sweep_point(const ScenarioConfig& cfg, double value);

}  // namespace rydsim::config

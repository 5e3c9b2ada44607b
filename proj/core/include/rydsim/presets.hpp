#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rydsim/scenario.hpp"

// Figure-reproduction pipelines. Each preset starts from a base scenario,
// sweeps what the figure sweeps, and writes `<id>.csv` (x, y, sigma columns
// plus a series label) and `<id>_summary.json` (fitted parameters and
// derived quantities). Nothing is tabulated: every number comes from the
// scenario physics and the simulated counts.
namespace rydsim::presets {

class UnknownPreset : public std::invalid_argument {
 public:
  explicit UnknownPreset(const std::string& id);
};

/// fig2a fig2b fig3a fig3b fig4 fig5 sfig1 sfig2 sfig3 sfig4 sfig5
const std::vector<std::string>& available();

/// Base scenario of a preset (its id, trial count and seed included).
ScenarioConfig base_config(std::string_view id);

struct ReproduceOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> n_trials;  ///< per simulated point
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

struct ReproduceResult {
  std::string id;
  std::vector<std::filesystem::path> outputs;  ///< relative to out_dir
  std::string summary_json;
};

/// Runs the preset and writes its CSV, summary and manifest.
/// Throws UnknownPreset for ids not in available().
ReproduceResult reproduce(std::string_view id, const ReproduceOptions& options);

}  // namespace rydsim::presets

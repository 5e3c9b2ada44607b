#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rydsim/counting.hpp"
#include "rydsim/detection.hpp"
#include "rydsim/fitting.hpp"
#include "rydsim/scenario.hpp"

// simulate -> analyze -> fit, with every artifact listed and hashed in
// manifest.json so a run can be replayed and checked from the manifest.
namespace rydsim::pipeline {

namespace fs = std::filesystem;

/// Click-probability estimate k / n with a binomial standard error.
counting::CorrelationEstimate click_probability(std::uint64_t k, std::uint64_t n);

/// All estimators that apply to the stream's detector layout. Estimators
/// without enough counts are left out and named in `skipped` (if given).
std::vector<counting::EstimateRow> analyze(const detect::TimeTagStream& stream, const counting::WindowSpec& windows,
                                           HbtArm hbt, const std::string& label,
                                           std::vector<std::string>* skipped = nullptr);

/// Looks up a quantity; throws InsufficientStatistics when it is missing.
const counting::CorrelationEstimate& find_estimate(const std::vector<counting::EstimateRow>& rows,
                                                   std::string_view quantity);

struct FitRequest {
  std::string quantity;  ///< estimate fitted against the sweep value
  fit::ModelId model = fit::ModelId::kGaussianLine;
  std::vector<fit::ParamSpec> params;  ///< empty: model defaults
};

struct RunOptions {
  fs::path out_dir = "out";
  int threads = 1;
  std::optional<FitRequest> fit;
  bool write_streams = true;
};

struct PointResult {
  double x = 0.0;  ///< sweep value (0 without a sweep)
  std::string label;
  std::vector<counting::EstimateRow> rows;
  std::vector<std::string> skipped;
};

struct RunResult {
  std::vector<PointResult> points;
  std::optional<fit::FitResult> fit;
  std::vector<fs::path> outputs;  ///< relative to out_dir, in write order
};

/// Simulates every sweep point, analyses it and optionally fits the sweep.
/// Writes config.json, streams/, estimates.csv, sweep.csv (with a sweep),
/// fit_result.json and residuals.csv (with a fit) and manifest.json.
/// Throws ConfigError before any compute when the scenario is invalid.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options);

// ---- fit records --------------------------------------------------------

/// Data CSV with header `x,y,sigma` (sigma optional; defaults to sqrt(max(y,1))).
std::vector<fit::DataPoint> parse_data_csv(std::string_view csv);

/// Problem record: {"model": id, "params": {name: {value, lower, upper,
/// transform, fixed}}, "options": {method, objective, max_iterations,
/// rel_tol, step_tol}}. Unlisted parameters keep the model defaults.
/// Throws ConfigError on unknown keys or bad values.
fit::FitProblem parse_problem(std::string_view json, std::vector<fit::DataPoint> data);

std::string fit_result_json(const fit::FitProblem& problem, const fit::FitResult& result);
std::string residuals_csv(const fit::FitProblem& problem, const fit::FitResult& result);

/// Fits and writes fit_result.json, residuals.csv and a manifest.
fit::FitResult run_fit(const fit::FitProblem& problem, const fs::path& out_dir, const std::string& inputs_hash);

// ---- manifests ----------------------------------------------------------

struct OutputRecord {
  std::string file;
  std::string fnv1a64;
  std::uint64_t bytes = 0;
};

OutputRecord hash_output(const fs::path& out_dir, const fs::path& relative);

/// `command` is the canonical sub-command ("simulate", "reproduce fig4",
/// "analyze", "fit"); thread counts are deliberately not recorded.
/// `extra_json`, if given, is a JSON object merged into the manifest.
void write_manifest(const fs::path& out_dir, const std::string& command, const ScenarioConfig* cfg,
                    const std::vector<fs::path>& outputs, const std::string& extra_json = {});

struct ReplayReport {
  bool ok = true;
  std::vector<std::string> mismatches;
};

/// Re-runs a "simulate" or "reproduce" manifest into `scratch_dir` and
/// compares every listed output hash.
ReplayReport replay_manifest(const fs::path& manifest_path, const fs::path& scratch_dir, int threads = 1);

}  // namespace rydsim::pipeline

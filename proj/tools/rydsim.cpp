// rydsim: simulate, analyze, fit and reproduce photon-correlation runs.
//
// Exit codes: 0 success, 2 configuration error, 3 insufficient statistics,
// 1 anything else.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rydsim/config_io.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/pipeline.hpp"
#include "rydsim/presets.hpp"
#include "rydsim/text_format.hpp"
#include "rydsim/time_tags.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rydsim;

constexpr int kExitConfig = 2;
constexpr int kExitStatistics = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out_dir = "out";
  int threads = 1;
};

ScenarioConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = text::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return config::parse(text);
}

void apply_globals(ScenarioConfig& cfg, const Globals& g) {
  if (g.seed) cfg.seed = *g.seed;
  if (g.trials) cfg.n_trials = *g.trials;
  require_valid(cfg);
}

int cmd_simulate(const Globals& g, const std::string& config_path, const std::string& fit_quantity,
                 const std::string& fit_model) {
  ScenarioConfig cfg = load_config(config_path);
  apply_globals(cfg, g);
  pipeline::RunOptions opt;
  opt.out_dir = g.out_dir;
  opt.threads = g.threads;
  if (!fit_quantity.empty()) {
    try {
      opt.fit = pipeline::FitRequest{fit_quantity, fit::parse_model_id(fit_model), {}};
    } catch (const std::invalid_argument& e) {
      throw ConfigError({std::string("--fit-model: ") + e.what()});
    }
  }
  const auto res = pipeline::run_scenario(cfg, opt);
  for (const auto& pt : res.points) {
    for (const auto& r : pt.rows)
      std::cout << pt.label << "  " << r.quantity << " = " << text::format_double(r.estimate.value) << " +- "
                << text::format_double(r.estimate.sigma) << (r.estimate.upper_limit ? " (upper limit)" : "") << "\n";
    for (const auto& s : pt.skipped) std::cout << pt.label << "  " << s << ": not enough counts\n";
  }
  if (res.fit) std::cout << "fit converged: " << (res.fit->converged ? "yes" : "no") << "\n";
  std::cout << "wrote " << res.outputs.size() + 1 << " files to " << g.out_dir << "\n";
  return 0;
}

int cmd_analyze(const Globals& g, const std::string& stream_path, const std::string& config_path) {
  ScenarioConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  detect::TimeTagStream stream;
  try {
    stream = detect::read_stream(stream_path);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({stream_path + ": " + e.what()});
  }
  const std::string label = stream.scenario_id.empty() ? cfg.id : stream.scenario_id;
  std::vector<std::string> skipped;
  const auto rows = pipeline::analyze(stream, counting::window_spec(cfg), cfg.hbt, label, &skipped);
  for (const auto& s : skipped) std::cerr << s << ": not enough counts\n";
  if (rows.empty()) throw InsufficientStatistics("no estimator had enough counts");
  const fs::path out = g.out_dir;
  text::write_file(out / "estimates.csv", counting::estimates_to_csv(rows));
  const std::string inputs = text::hex64(text::fnv1a64(text::read_file(stream_path)));
  pipeline::write_manifest(out, "analyze", &cfg, {"estimates.csv"}, "{\"inputs_hash\":\"" + inputs + "\"}");
  std::cout << counting::estimates_to_csv(rows);
  return 0;
}

int cmd_fit(const Globals& g, const std::string& data_path, const std::string& problem_path) {
  std::string data_text, problem_text;
  try {
    data_text = text::read_file(data_path);
    problem_text = text::read_file(problem_path);
  } catch (const std::exception& e) {
    throw ConfigError({e.what()});
  }
  auto problem = pipeline::parse_problem(problem_text, pipeline::parse_data_csv(data_text));
  const std::string inputs = text::hex64(text::fnv1a64(data_text + problem_text));
  const auto r = pipeline::run_fit(problem, g.out_dir, inputs);
  for (std::size_t i = 0; i < r.params.size(); ++i)
    std::cout << r.names[i] << " = " << text::format_double(r.params[i]) << " +- " << text::format_double(r.sigma[i])
              << "\n";
  std::cout << "chi2 = " << text::format_double(r.chi_square) << " (dof " << r.n_dof << "), converged "
            << (r.converged ? "yes" : "no") << (r.diagnostics.empty() ? "" : ": " + r.diagnostics) << "\n";
  return r.converged ? 0 : 1;
}

int cmd_reproduce(const Globals& g, const std::string& id) {
  presets::ReproduceOptions opt;
  opt.out_dir = g.out_dir;
  opt.n_trials = g.trials;
  opt.seed = g.seed;
  opt.threads = g.threads;
  const auto r = presets::reproduce(id, opt);
  std::cout << r.summary_json;
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const ScenarioConfig cfg = load_config(config_path);
  std::cout << "ok: " << cfg.id << " (hash " << config::scenario_hash(cfg) << ")\n";
  return 0;
}

int cmd_verify(const Globals& g, const std::string& manifest) {
  const auto rep = pipeline::replay_manifest(manifest, g.out_dir, g.threads);
  for (const auto& m : rep.mismatches) std::cout << "mismatch: " << m << "\n";
  std::cout << (rep.ok ? "all outputs reproduced\n" : "replay differs\n");
  return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rydsim: DLCZ source + Rydberg memory photon-counting simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Override the scenario seed");
  app.add_option("--trials", g.trials, "Override n_trials (per simulated point)")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  std::string config_path, stream_path, data_path, problem_path, preset, manifest, fit_quantity, fit_model;

  auto* sim = app.add_subcommand("simulate", "Simulate a scenario (and its sweep), analyze and optionally fit");
  sim->add_option("-c,--config", config_path, "Scenario JSON")->required();
  sim->add_option("--fit-quantity", fit_quantity, "Estimate to fit against the sweep variable (e.g. g2_wr)");
  sim->add_option("--fit-model", fit_model, "Model id for --fit-quantity");

  auto* ana = app.add_subcommand("analyze", "Compute estimators from a time-tag CSV");
  ana->add_option("-s,--stream", stream_path, "Time-tag CSV")->required();
  ana->add_option("-c,--config", config_path, "Scenario JSON for windows and detector layout");

  auto* fitc = app.add_subcommand("fit", "Fit a model to x,y,sigma data");
  fitc->add_option("-d,--data", data_path, "Data CSV (x,y,sigma)")->required();
  fitc->add_option("-p,--problem", problem_path, "Problem JSON")->required();

  auto* rep = app.add_subcommand("reproduce", "Run a figure preset");
  rep->add_option("figure", preset, "Preset id")->required();

  auto* val = app.add_subcommand("validate-config", "Check a scenario file");
  val->add_option("-c,--config,config", config_path, "Scenario JSON")->required();

  auto* ver = app.add_subcommand("verify-manifest", "Re-run a manifest into --out-dir and compare hashes");
  ver->add_option("manifest", manifest, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) {
      if (fit_quantity.empty() != fit_model.empty())
        throw ConfigError({"--fit-quantity and --fit-model go together"});
      return cmd_simulate(g, config_path, fit_quantity, fit_model);
    }
    if (*ana) return cmd_analyze(g, stream_path, config_path);
    if (*fitc) return cmd_fit(g, data_path, problem_path);
    if (*rep) return cmd_reproduce(g, preset);
    if (*val) return cmd_validate(config_path);
    if (*ver) return cmd_verify(g, manifest);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const presets::UnknownPreset& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const InsufficientStatistics& e) {
    std::cerr << "insufficient statistics: " << e.what() << "\n";
    return kExitStatistics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "rydsim/config_io.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/pipeline.hpp"
#include "rydsim/presets.hpp"
#include "rydsim/text_format.hpp"
#include "rydsim/time_tags.hpp"
#include "test_support.hpp"

using namespace rydsim;
namespace fs = std::filesystem;
using json = nlohmann::json;
using rydsim::testing::ideal_config;
using rydsim::testing::scratch_dir;

namespace {

ScenarioConfig small_config() {
  auto c = ideal_config(0.05, 0.4, 0.4);
  c.id = "small";
  c.n_trials = 20000;
  c.seed = 77;
  return c;
}

std::string slurp(const fs::path& p) { return text::read_file(p); }

}  // namespace

TEST(Pipeline, MinimalRunWritesManifest) {
  auto c = small_config();
  c.n_trials = 1000;
  const auto dir = scratch_dir("minimal");
  pipeline::RunOptions opt;
  opt.out_dir = dir;
  const auto res = pipeline::run_scenario(c, opt);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "config.json"));
  EXPECT_TRUE(fs::exists(dir / "estimates.csv"));
  const auto m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["seed"], 77);
  EXPECT_EQ(m["scenario_hash"], config::scenario_hash(c));
  EXPECT_EQ(m["outputs"].size(), res.outputs.size());
  EXPECT_EQ(config::serialize(config::parse(slurp(dir / "config.json"))), config::serialize(c));
}

TEST(Pipeline, RerunAndThreadCountGiveIdenticalFiles) {
  auto c = small_config();
  c.sweep = {"source.p", {0.02, 0.05}};
  const auto a = scratch_dir("det_a");
  const auto b = scratch_dir("det_b");
  pipeline::RunOptions opt;
  opt.out_dir = a;
  const auto ra = pipeline::run_scenario(c, opt);
  opt.out_dir = b;
  opt.threads = 4;
  pipeline::run_scenario(c, opt);
  for (const auto& f : ra.outputs) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  EXPECT_TRUE(fs::exists(a / "sweep.csv"));
}

TEST(Pipeline, InvalidConfigRejectedBeforeCompute) {
  auto c = small_config();
  c.source.p = -1.0;
  const auto dir = scratch_dir("invalid");
  pipeline::RunOptions opt;
  opt.out_dir = dir;
  EXPECT_THROW(pipeline::run_scenario(c, opt), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "manifest.json"));
  c = small_config();
  c.sweep = {"source.p", {0.01, 1.5}};
  EXPECT_THROW(pipeline::run_scenario(c, opt), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "config.json"));
}

TEST(Pipeline, ManifestReplayReproducesOutputs) {
  auto c = small_config();
  const auto dir = scratch_dir("replay_src");
  pipeline::RunOptions opt;
  opt.out_dir = dir;
  opt.fit = pipeline::FitRequest{"g2_wr", fit::ModelId::kGaussianLine, {}};
  c.sweep = {"source.p", {0.02, 0.03, 0.04, 0.05, 0.06}};
  pipeline::run_scenario(c, opt);
  const auto rep = pipeline::replay_manifest(dir / "manifest.json", scratch_dir("replay_dst"), 2);
  EXPECT_TRUE(rep.ok);
  for (const auto& m : rep.mismatches) ADD_FAILURE() << m;
}

TEST(Pipeline, ManifestHashMismatchDetected) {
  const auto dir = scratch_dir("mismatch");
  pipeline::RunOptions opt;
  opt.out_dir = dir;
  pipeline::run_scenario(small_config(), opt);
  auto m = json::parse(slurp(dir / "manifest.json"));
  m["outputs"][0]["fnv1a64"] = "0000000000000000";
  text::write_file(dir / "manifest.json", m.dump(2) + "\n");
  const auto rep = pipeline::replay_manifest(dir / "manifest.json", scratch_dir("mismatch_dst"));
  EXPECT_FALSE(rep.ok);
  EXPECT_FALSE(rep.mismatches.empty());
}

TEST(Pipeline, StreamCsvRoundTrip) {
  const auto c = small_config();
  const auto s = detect::run_trials(c, 5000, 3);
  const auto back = detect::stream_from_csv(detect::stream_to_csv(s));
  ASSERT_EQ(back.tags.size(), s.tags.size());
  for (std::size_t i = 0; i < s.tags.size(); ++i) {
    EXPECT_EQ(back.tags[i].detector, s.tags[i].detector);
    EXPECT_EQ(back.tags[i].trial, s.tags[i].trial);
    EXPECT_NEAR(back.tags[i].t_us, s.tags[i].t_us, 5e-7);
  }
  EXPECT_EQ(detect::stream_to_csv(s).substr(0, 19), "detector,trial,t_us");
}

TEST(Pipeline, AnalyzeSkipsEstimatorsWithoutCounts) {
  auto c = small_config();
  c.source.eta_r = 0.0;
  const auto s = detect::run_trials(c, 2000, 1);
  std::vector<std::string> skipped;
  const auto rows = pipeline::analyze(s, counting::window_spec(c), c.hbt, c.id, &skipped);
  EXPECT_FALSE(skipped.empty());
  EXPECT_NO_THROW(pipeline::find_estimate(rows, "p_w"));
  EXPECT_THROW(pipeline::find_estimate(rows, "g2_wr"), InsufficientStatistics);
}

TEST(Pipeline, AnalyzeRowsPerLayout) {
  auto c = small_config();
  const auto w = counting::window_spec(c);
  auto names = [](const std::vector<counting::EstimateRow>& rows) {
    std::vector<std::string> n;
    for (const auto& r : rows) n.push_back(r.quantity);
    return n;
  };
  c.n_trials = 50000;
  const auto none = pipeline::analyze(detect::run_trials(c, 50000, 1), w, HbtArm::kNone, "x");
  EXPECT_EQ(names(none), (std::vector<std::string>{"p_w", "p_r", "p_wr", "g2_wr", "p_r_given_w"}));
  c.hbt = HbtArm::kRead;
  c.source.p = 0.2;
  const auto rd = pipeline::analyze(detect::run_trials(c, 50000, 1), w, HbtArm::kRead, "x");
  EXPECT_EQ(names(rd), (std::vector<std::string>{"p_w", "alpha", "g2_rr", "g2_wr_D3", "g2_wr_D4"}));
}

TEST(FitRecords, DataCsvParsing) {
  const auto d = pipeline::parse_data_csv("x,y,sigma\n1,2,0.5\n3,4,0.25\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[1].sigma, 0.25);
  const auto n = pipeline::parse_data_csv("x,y\n1,9\n2,0\n");
  EXPECT_EQ(n[0].sigma, 3.0);
  EXPECT_EQ(n[1].sigma, 1.0);
  EXPECT_THROW(pipeline::parse_data_csv("a,b\n1,2\n"), ConfigError);
}

TEST(FitRecords, ProblemParsing) {
  const auto p = pipeline::parse_problem(
      R"({"model": "saturation", "params": {"n_max": {"value": 60, "fixed": true}},
          "options": {"method": "simplex", "objective": "least_squares", "max_iterations": 50}})",
      {{1, 1, 1}, {2, 2, 1}});
  EXPECT_EQ(p.model, fit::ModelId::kSaturation);
  EXPECT_EQ(p.params[0].value, 60.0);
  EXPECT_TRUE(p.params[0].fixed);
  EXPECT_EQ(p.options.method, fit::Method::kSimplex);
  EXPECT_EQ(p.options.max_iterations, 50);
  EXPECT_THROW(pipeline::parse_problem(R"({"model": "saturation", "params": {"zzz": {}}})", {}), ConfigError);
  EXPECT_THROW(pipeline::parse_problem(R"({"model": "nope"})", {}), ConfigError);
  EXPECT_THROW(pipeline::parse_problem(R"({"model": "saturation", "extra": 1})", {}), ConfigError);
}

TEST(FitRecords, RunFitWritesRecords) {
  std::vector<fit::DataPoint> data;
  for (double x : {1.0, 5.0, 20.0, 50.0, 100.0, 200.0, 400.0}) {
    const double y = 68.0 * 0.0044 * -std::expm1(-x / 68.0);
    data.push_back({x, y, 0.02 * y});
  }
  auto problem = fit::make_problem(fit::ModelId::kSaturation, data);
  const auto dir = scratch_dir("runfit");
  const auto r = pipeline::run_fit(problem, dir, "abc");
  EXPECT_TRUE(r.converged);
  const auto j = json::parse(slurp(dir / "fit_result.json"));
  EXPECT_EQ(j["params"][0]["name"], "n_max");
  EXPECT_NEAR(j["params"][0]["value"].get<double>(), 68.0, 1e-4);
  EXPECT_EQ(slurp(dir / "residuals.csv").substr(0, 25), "x,y,sigma,model,residual\n");
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Presets, SmallReproduceRunsAndReplays) {
  const auto dir = scratch_dir("preset");
  presets::ReproduceOptions opt;
  opt.out_dir = dir;
  opt.n_trials = 2'000'000;
  opt.threads = 4;
  const auto r = presets::reproduce("sfig1", opt);
  EXPECT_TRUE(fs::exists(dir / "sfig1.csv"));
  EXPECT_TRUE(fs::exists(dir / "sfig1_summary.json"));
  const auto csv = slurp(dir / "sfig1.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "series,x,y,sigma");
  const auto rep = pipeline::replay_manifest(dir / "manifest.json", scratch_dir("preset_dst"), 3);
  EXPECT_TRUE(rep.ok);
  presets::ReproduceOptions bad = opt;
  EXPECT_THROW(presets::reproduce("fig99", bad), presets::UnknownPreset);
}

TEST(Presets, AnalyticPresetsNeedNoSimulation) {
  for (const auto& [id, key] : {std::pair{"fig5", "fit_saturation"}, std::pair{"sfig2", "fit_coupling_on"}}) {
    const auto dir = scratch_dir(id);
    presets::ReproduceOptions opt;
    opt.out_dir = dir;
    const auto r = presets::reproduce(id, opt);
    const auto s = json::parse(r.summary_json);
    EXPECT_EQ(s["preset"], id);
    EXPECT_TRUE(s.contains(key)) << id;
  }
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "rydsim/config_io.hpp"
#include "rydsim/text_format.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace rydsim;
using rydsim::testing::scratch_dir;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RYDSIM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const ScenarioConfig& c) {
  const auto p = dir / "scenario.json";
  text::write_file(p, config::serialize(c));
  return p;
}

}  // namespace

TEST(Cli, SimulateSucceedsAndWritesManifest) {
  const auto dir = scratch_dir("cli_sim");
  auto c = rydsim::testing::ideal_config(0.05, 0.4, 0.4);
  c.n_trials = 2000;
  const auto cfg = write_config(dir, c);
  EXPECT_EQ(run("--out-dir " + (dir / "out").string() + " simulate -c " + cfg.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  EXPECT_EQ(run("--out-dir " + (dir / "replay").string() + " verify-manifest " + (dir / "out" / "manifest.json").string()), 0);
  EXPECT_EQ(run("--out-dir " + (dir / "ana").string() + " analyze -s " + (dir / "out" / "streams" / "stream.csv").string() +
                " -c " + cfg.string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "ana" / "estimates.csv"));
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = scratch_dir("cli_cfg");
  text::write_file(dir / "bad.json", R"({"source": {"p": 3}})");
  text::write_file(dir / "unknown.json", R"({"sauce": {}})");
  EXPECT_EQ(run("validate-config -c " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run("validate-config -c " + (dir / "unknown.json").string()), 2);
  EXPECT_EQ(run("simulate -c " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run("reproduce fig99"), 2);
  EXPECT_EQ(run("--threads 0 validate-config -c x"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("validate-config -c " + write_config(dir, ScenarioConfig{}).string()), 0);
}

TEST(Cli, NoCountsExitThree) {
  const auto dir = scratch_dir("cli_stats");
  auto c = rydsim::testing::ideal_config(0.05, 0.4, 0.4);
  c.n_trials = 200;
  c.sweep = {"source.p", {1e-9, 2e-9, 3e-9, 4e-9}};
  const auto cfg = write_config(dir, c);
  EXPECT_EQ(run("--out-dir " + (dir / "out").string() + " simulate -c " + cfg.string() +
                " --fit-quantity g2_wr --fit-model gaussian_line"),
            3);
}

TEST(Cli, FitSubcommand) {
  const auto dir = scratch_dir("cli_fit");
  std::string csv = "x,y,sigma\n";
  for (double x : {1.0, 5.0, 20.0, 50.0, 100.0, 200.0, 400.0}) {
    const double y = 68.0 * 0.0044 * -std::expm1(-x / 68.0);
    csv += text::format_double(x) + "," + text::format_double(y) + "," + text::format_double(0.02 * y) + "\n";
  }
  text::write_file(dir / "data.csv", csv);
  text::write_file(dir / "problem.json", R"({"model": "saturation"})");
  EXPECT_EQ(run("--out-dir " + (dir / "out").string() + " fit -d " + (dir / "data.csv").string() + " -p " +
                (dir / "problem.json").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "out" / "fit_result.json"));
  text::write_file(dir / "bad_problem.json", R"({"model": "saturation", "params": {"n_max": {"lower": 5, "upper": 1}}})");
  EXPECT_EQ(run("fit -d " + (dir / "data.csv").string() + " -p " + (dir / "bad_problem.json").string()), 2);
}

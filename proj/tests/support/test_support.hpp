#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "rydsim/scenario.hpp"

namespace rydsim::testing {

// Noise-free D1/D2 scenario: every loss sits in the detector efficiencies,
// no random emission, no background, and windows wide enough to hold the
// whole (truncated) pulses.
inline ScenarioConfig ideal_config(double p, double eta_w, double eta_r) {
  ScenarioConfig c;
  c.id = "ideal";
  c.source.p = p;
  c.source.eta_w = 1.0;
  c.source.eta_r = 1.0;
  c.source.eta_a = 1.0;
  c.source.p_se = 0.0;
  c.source.p_nw = 0.0;
  c.source.p_nr = 0.0;
  c.source.tau_dlcz_us = 1e9;
  c.timing.write_center_us = 0.1;
  c.timing.t_a_us = 1.0;
  c.windows.write_width_us = 0.08;
  c.windows.read_width_us = 1.6;
  c.detectors.d1 = {eta_w, 0.0, 0.06};
  c.detectors.d2 = {eta_r, 0.0, 1.6};
  c.detectors.d3 = {eta_r, 0.0, 1.6};
  c.detectors.d4 = {eta_r, 0.0, 1.6};
  return c;
}

// E[a^n] for P(n) = (1 - p) p^n.
inline double thermal_pgf(double p, double a) { return (1.0 - p) / (1.0 - p * a); }

// Exact click probabilities of threshold detectors on a two-mode squeezed
// state with independent per-photon efficiencies ew (write) and er (read).
struct ThresholdClicks {
  double w, r, wr;
};

inline ThresholdClicks threshold_clicks(double p, double ew, double er) {
  const double no_w = thermal_pgf(p, 1.0 - ew);
  const double no_r = thermal_pgf(p, 1.0 - er);
  const double none = thermal_pgf(p, (1.0 - ew) * (1.0 - er));
  return {1.0 - no_w, 1.0 - no_r, 1.0 - no_w - no_r + none};
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("rydsim_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rydsim::testing

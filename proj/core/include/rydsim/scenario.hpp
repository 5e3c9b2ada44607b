#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydsim/photon_source.hpp"
#include "rydsim/rydberg_memory.hpp"

namespace rydsim {

/// Single-photon detector: threshold detection with per-gate dark counts.
struct SpdParams {
  double efficiency = 1.0;
  double dark_prob_per_gate = 0.0;
  double gate_width_us = 0.6;  ///< dark counts are uniform over this gate

  void validate() const;
};

/// What the read photon meets in site B.
enum class SiteBMode {
  kBypass,     ///< no atoms loaded
  kSlowLight,  ///< coupling beam kept on
  kStorage,    ///< stored as a Rydberg excitation for t_B and retrieved
};

/// Where the 50:50 beam splitter of the HBT setup sits.
enum class HbtArm {
  kNone,   ///< write -> D1, read -> D2
  kRead,   ///< write -> D1, read -> D3/D4
  kWrite,  ///< write -> D3/D4, read -> D2
};

struct TimingConfig {
  double write_center_us = 0.1;  ///< write-pulse centre within a trial
  double t_a_us = 1.0;           ///< spin-wave storage time in site A
  double t_b_us = 0.5;           ///< Rydberg storage time in site B
  double trial_period_us = 100.0;
};

struct WaveformConfig {
  double write_fwhm_us = 0.02;
  double read_fwhm_us = 0.35;
  double bin_us = 0.002;  ///< sampling grid of the click-time waveforms
};

/// Slow light with coupling on: `transmission` of the read pulse, of which
/// `leak_fraction` leaves undelayed and the rest is delayed by `delay_us`.
struct SlowLightConfig {
  double transmission = 0.23;
  double leak_fraction = 0.42;
  double delay_us = 0.47;
};

/// Uncorrelated, unslowed read-mode noise pulse (e.g. off-resonant
/// scattering in site B). `prob` is the per-trial probability of one noise
/// photon reaching the read detector(s).
struct ReadNoiseConfig {
  double prob = 0.0;
  double center_offset_us = 0.0;  ///< relative to the read input centre
  double fwhm_us = 0.35;
};

struct DetectorSet {
  SpdParams d1{0.3, 1e-6, 0.06};
  SpdParams d2{0.152, 1e-5, 0.6};
  SpdParams d3{0.152, 1e-5, 0.6};
  SpdParams d4{0.152, 1e-5, 0.6};
};

struct WindowConfig {
  double write_width_us = 0.06;
  double read_width_us = 0.6;
  int n_accidental_peaks = 6;
  std::optional<double> read_center_us;  ///< defaults to the expected arrival
};

struct SweepConfig {
  std::string variable;  ///< config path, e.g. "source.p" or "timing.t_b_us"
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string id = "default";
  source::DlczSourceParams source;
  memory::EitMediumParams medium;
  memory::StorageParams storage;
  memory::SaturationParams saturation;
  SiteBMode site_b = SiteBMode::kBypass;
  HbtArm hbt = HbtArm::kNone;
  TimingConfig timing;
  WaveformConfig waveforms;
  SlowLightConfig slow_light;
  ReadNoiseConfig read_noise;
  DetectorSet detectors;
  WindowConfig windows;
  SweepConfig sweep;
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
};

/// Field-level validation; empty when the scenario is valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

/// Throws ConfigError carrying every diagnostic from validate().
void require_valid(const ScenarioConfig& cfg);

/// Centre of the read pulse at the site-B input (write centre + t_A).
double read_input_center_us(const ScenarioConfig& cfg);

/// Delay added by site B to the bulk of the read pulse.
double site_b_delay_us(const ScenarioConfig& cfg);

/// Read-window centre: explicit value or read input centre + site-B delay.
double read_window_center_us(const ScenarioConfig& cfg);

/// Fraction of read photons passed by site B into the delayed/retrieved
/// component and into the undelayed leak, respectively.
struct SiteBTransfer {
  double main = 1.0;
  double leak = 0.0;
};
SiteBTransfer site_b_transfer(const ScenarioConfig& cfg);

/// Noise-model parameters seen by the D1/D2 pair: path transmissions folded
/// with detector efficiencies and the site-B transfer, stray light combined
/// with dark counts. Valid for HbtArm::kNone.
source::DlczSourceParams effective_source_params(const ScenarioConfig& cfg);

}  // namespace rydsim

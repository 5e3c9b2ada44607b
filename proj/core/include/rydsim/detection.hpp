#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rydsim/rng.hpp"
#include "rydsim/scenario.hpp"
#include "rydsim/waveform.hpp"

// Trial-by-trial Monte Carlo of the photon-counting experiment: pair
// sampling, loss, threshold detection with dark counts, click times drawn
// from pulse waveforms, optional HBT splitting and site-B pass-through.
namespace rydsim::detect {

enum class Detector : std::uint8_t { D1 = 1, D2 = 2, D3 = 3, D4 = 4 };

std::string_view to_string(Detector d);
/// Parses "D1".."D4"; throws std::invalid_argument otherwise.
Detector parse_detector(std::string_view s);

struct TimeTag {
  Detector detector = Detector::D1;
  std::uint64_t trial = 0;
  double t_us = 0.0;  ///< time within the trial

  friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

/// Tag order: trial, then time, then detector.
bool tag_less(const TimeTag& a, const TimeTag& b);

struct TimeTagStream {
  std::vector<TimeTag> tags;  ///< sorted by tag_less
  std::uint64_t trial_count = 0;
  double trial_period_us = 0.0;
  std::uint64_t seed = 0;
  std::string scenario_id;

  bool is_sorted() const;
};

struct PairSample {
  int n_write = 0;
  int n_read = 0;
};

/// Inverse-CDF draw from P(n) = (1 - p) p^n; both modes get the same n.
PairSample sample_pair(double p, Rng& rng);

/// Number of photons out of `n` surviving a loss with transmission `eta`.
int thin(int n, double eta, Rng& rng);

/// Threshold detector: Binomial(n, efficiency) >= 1 or a dark count.
bool thin_and_darken(int n, const SpdParams& spd, Rng& rng);

/// Inverse-CDF sampler over a waveform's bins; the bin is chosen with
/// probability proportional to its intensity and the time is uniform
/// within the bin.
class WaveformSampler {
 public:
  explicit WaveformSampler(const PulseWaveform& shape);
  double operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
  std::vector<double> t_;
  double bin_width_ = 0.0;
};

double waveform_time_sampler(const PulseWaveform& shape, Rng& rng);

/// Simulates `n_trials` trials of `cfg` (sweep ignored). Trial i draws from
/// Rng::substream(seed, i), so the result does not depend on `threads`.
/// Throws ConfigError on an invalid scenario.
TimeTagStream run_trials(const ScenarioConfig& cfg, std::uint64_t n_trials, std::uint64_t seed,
                         int threads = 1);

/// Concatenates `b` after `a`, renumbering b's trials.
TimeTagStream merge_streams(const TimeTagStream& a, const TimeTagStream& b);

}  // namespace rydsim::detect

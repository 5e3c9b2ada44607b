#pragma once

#include <vector>

namespace rydsim {

/// Sampled temporal intensity profile of a pulse. Each sample is the
/// intensity of a bin of width `bin_width_us` centred on `t_us`.
struct PulseWaveform {
  struct Sample {
    double t_us = 0.0;
    double intensity = 0.0;
  };

  std::vector<Sample> samples;
  double bin_width_us = 0.0;

  /// Throws std::invalid_argument on negative intensity, non-increasing
  /// times, or a non-positive bin width.
  void validate() const;

  /// Trapezoidal integral of the intensity.
  double mass() const;

  /// Uniform grid from `t_begin` to `t_end` (inclusive) with a Gaussian of
  /// the given centre and FWHM.
  static PulseWaveform gaussian(double center_us, double fwhm_us, double bin_width_us,
                                double t_begin_us, double t_end_us);

  /// Single non-zero bin at `t_us`.
  static PulseWaveform delta(double t_us, double bin_width_us);

  PulseWaveform shifted(double dt_us) const;
  PulseWaveform scaled(double factor) const;
};

}  // namespace rydsim

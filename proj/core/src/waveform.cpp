#include "rydsim/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace rydsim {

void PulseWaveform::validate() const {
  if (!(bin_width_us > 0.0) || !std::isfinite(bin_width_us))
    throw std::invalid_argument("waveform bin width must be > 0");
  if (samples.empty()) throw std::invalid_argument("waveform has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t_us) || !std::isfinite(s.intensity) || s.intensity < 0.0)
      throw std::invalid_argument("waveform intensities must be finite and non-negative");
    if (i > 0 && !(s.t_us > samples[i - 1].t_us))
      throw std::invalid_argument("waveform times must be strictly increasing");
  }
}

double PulseWaveform::mass() const {
  if (samples.size() == 1) return samples.front().intensity * bin_width_us;
  double m = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    m += 0.5 * (samples[i].intensity + samples[i - 1].intensity) *
         (samples[i].t_us - samples[i - 1].t_us);
  }
  return m;
}

PulseWaveform PulseWaveform::gaussian(double center_us, double fwhm_us, double bin_width_us,
                                      double t_begin_us, double t_end_us) {
  if (!(fwhm_us > 0.0)) throw std::invalid_argument("gaussian FWHM must be > 0");
  if (!(bin_width_us > 0.0) || !(t_end_us > t_begin_us))
    throw std::invalid_argument("gaussian grid must be non-empty");
  const double sigma = fwhm_us / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  PulseWaveform w;
  w.bin_width_us = bin_width_us;
  const auto n = static_cast<std::size_t>(std::floor((t_end_us - t_begin_us) / bin_width_us + 1e-9)) + 1;
  w.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_begin_us + static_cast<double>(i) * bin_width_us;
    const double z = (t - center_us) / sigma;
    w.samples.push_back({t, std::exp(-0.5 * z * z)});
  }
  return w;
}

PulseWaveform PulseWaveform::delta(double t_us, double bin_width_us) {
  PulseWaveform w;
  w.bin_width_us = bin_width_us;
  w.samples.push_back({t_us, 1.0});
  return w;
}

PulseWaveform PulseWaveform::shifted(double dt_us) const {
  PulseWaveform w = *this;
  for (auto& s : w.samples) s.t_us += dt_us;
  return w;
}

PulseWaveform PulseWaveform::scaled(double factor) const {
  PulseWaveform w = *this;
  for (auto& s : w.samples) s.intensity *= factor;
  return w;
}

}  // namespace rydsim

#include "rydsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rydsim/errors.hpp"

namespace rydsim {
namespace {

std::string join_diagnostics(const std::vector<std::string>& d) {
  std::string s = "invalid configuration:";
  for (const auto& line : d) s += "\n  " + line;
  return s;
}

template <typename Fn>
void collect(std::vector<std::string>& out, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    out.emplace_back(e.what());
  }
}

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void check_spd(std::vector<std::string>& out, const SpdParams& d, const std::string& name) {
  collect(out, [&] {
    try {
      d.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("detectors." + name + ": " + e.what());
    }
  });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

void SpdParams::validate() const {
  if (!in_unit(efficiency)) throw std::invalid_argument("efficiency must lie in [0, 1]");
  if (!in_unit(dark_prob_per_gate) || dark_prob_per_gate >= 1.0)
    throw std::invalid_argument("dark_prob_per_gate must lie in [0, 1)");
  if (!std::isfinite(gate_width_us) || gate_width_us <= 0.0)
    throw std::invalid_argument("gate_width_us must be > 0");
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  collect(out, [&] { cfg.source.validate(); });
  collect(out, [&] { cfg.medium.validate(); });
  collect(out, [&] { cfg.storage.validate(); });
  collect(out, [&] { cfg.saturation.validate(); });
  check_spd(out, cfg.detectors.d1, "d1");
  check_spd(out, cfg.detectors.d2, "d2");
  check_spd(out, cfg.detectors.d3, "d3");
  check_spd(out, cfg.detectors.d4, "d4");

  const auto& t = cfg.timing;
  if (!(t.t_a_us >= 0.0)) out.emplace_back("timing.t_a_us must be >= 0");
  if (!(t.t_b_us >= 0.0)) out.emplace_back("timing.t_b_us must be >= 0");
  if (!(t.write_center_us >= 0.0)) out.emplace_back("timing.write_center_us must be >= 0");
  if (!(t.trial_period_us > 0.0)) out.emplace_back("timing.trial_period_us must be > 0");

  const auto& wf = cfg.waveforms;
  if (!(wf.write_fwhm_us > 0.0)) out.emplace_back("waveforms.write_fwhm_us must be > 0");
  if (!(wf.read_fwhm_us > 0.0)) out.emplace_back("waveforms.read_fwhm_us must be > 0");
  if (!(wf.bin_us > 0.0)) out.emplace_back("waveforms.bin_us must be > 0");

  const auto& sl = cfg.slow_light;
  if (!in_unit(sl.transmission)) out.emplace_back("slow_light.transmission must lie in [0, 1]");
  if (!in_unit(sl.leak_fraction)) out.emplace_back("slow_light.leak_fraction must lie in [0, 1]");
  if (!(sl.delay_us >= 0.0)) out.emplace_back("slow_light.delay_us must be >= 0");

  const auto& rn = cfg.read_noise;
  if (!in_unit(rn.prob)) out.emplace_back("read_noise.prob must lie in [0, 1]");
  if (!(rn.fwhm_us > 0.0)) out.emplace_back("read_noise.fwhm_us must be > 0");

  const auto& w = cfg.windows;
  if (!(w.write_width_us > 0.0)) out.emplace_back("windows.write_width_us must be > 0");
  if (!(w.read_width_us > 0.0)) out.emplace_back("windows.read_width_us must be > 0");
  if (w.n_accidental_peaks < 1) out.emplace_back("windows.n_accidental_peaks must be >= 1");

  if (cfg.n_trials < 1) out.emplace_back("n_trials must be >= 1");
  if (!cfg.sweep.variable.empty() && cfg.sweep.values.empty())
    out.emplace_back("sweep.values must be non-empty when sweep.variable is set");
  if (cfg.sweep.variable.empty() && !cfg.sweep.values.empty())
    out.emplace_back("sweep.variable must be set when sweep.values is non-empty");

  if (out.empty()) {
    // Both windows must sit inside one trial period.
    const double half_w = 0.5 * w.write_width_us;
    const double half_r = 0.5 * w.read_width_us;
    if (t.write_center_us - half_w < 0.0 || t.write_center_us + half_w > t.trial_period_us)
      out.emplace_back("windows.write_width_us: write window leaves the trial period");
    const double rc = read_window_center_us(cfg);
    if (rc - half_r < 0.0 || rc + half_r > t.trial_period_us)
      out.emplace_back("windows.read_width_us: read window leaves the trial period");
  }
  return out;
}

void require_valid(const ScenarioConfig& cfg) {
  auto d = validate(cfg);
  if (!d.empty()) throw ConfigError(std::move(d));
}

double read_input_center_us(const ScenarioConfig& cfg) {
  return cfg.timing.write_center_us + cfg.timing.t_a_us;
}

double site_b_delay_us(const ScenarioConfig& cfg) {
  switch (cfg.site_b) {
    case SiteBMode::kBypass:
      return 0.0;
    case SiteBMode::kSlowLight:
      return cfg.slow_light.delay_us;
    case SiteBMode::kStorage:
      return cfg.timing.t_b_us + cfg.storage.t_off_us;
  }
  return 0.0;
}

double read_window_center_us(const ScenarioConfig& cfg) {
  if (cfg.windows.read_center_us) return *cfg.windows.read_center_us;
  return read_input_center_us(cfg) + site_b_delay_us(cfg);
}

SiteBTransfer site_b_transfer(const ScenarioConfig& cfg) {
  const auto& sl = cfg.slow_light;
  switch (cfg.site_b) {
    case SiteBMode::kBypass:
      return {1.0, 0.0};
    case SiteBMode::kSlowLight:
      return {sl.transmission * (1.0 - sl.leak_fraction), sl.transmission * sl.leak_fraction};
    case SiteBMode::kStorage: {
      const double t_total = cfg.timing.t_b_us + cfg.storage.t_off_us;
      const double retrieved = memory::storage_efficiency(cfg.storage, std::max(t_total, 0.0));
      const double leak = sl.transmission * sl.leak_fraction;
      return {retrieved, std::min(leak, 1.0 - retrieved)};
    }
  }
  return {};
}

source::DlczSourceParams effective_source_params(const ScenarioConfig& cfg) {
  auto eff = cfg.source;
  const auto& d1 = cfg.detectors.d1;
  const auto& d2 = cfg.detectors.d2;
  const double dark1 = d1.dark_prob_per_gate * std::min(1.0, cfg.windows.write_width_us / d1.gate_width_us);
  const double dark2 = d2.dark_prob_per_gate * std::min(1.0, cfg.windows.read_width_us / d2.gate_width_us);
  eff.eta_w = cfg.source.eta_w * d1.efficiency;
  eff.p_nw = 1.0 - (1.0 - cfg.source.p_nw) * (1.0 - dark1);
  eff.eta_r = site_b_transfer(cfg).main * cfg.source.eta_r * d2.efficiency;
  eff.p_nr = 1.0 - (1.0 - cfg.source.p_nr) * (1.0 - dark2);
  return eff;
}

}  // namespace rydsim

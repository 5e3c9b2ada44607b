#include "rydsim/presets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "rydsim/config_io.hpp"
#include "rydsim/counting.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/pipeline.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/rydberg_memory.hpp"
#include "rydsim/text_format.hpp"
#include "rydsim/waveform.hpp"

namespace rydsim::presets {
namespace {

using json = nlohmann::ordered_json;
using counting::CorrelationEstimate;
using counting::EstimateRow;
namespace fs = std::filesystem;

// Gaussian FWHM / sigma.
const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::log(2.0));

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

// Pair probabilities giving write click probabilities from `pw_lo` to
// `pw_hi` (log spaced) for the scenario's write efficiency.
std::vector<double> pair_probabilities_for_pw(const ScenarioConfig& cfg, double pw_lo, double pw_hi, int n) {
  const double eta = effective_source_params(cfg).eta_w;
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double pw = pw_lo * std::pow(pw_hi / pw_lo, static_cast<double>(i) / (n - 1));
    out.push_back(std::min(pw / eta, 0.5));
  }
  return out;
}

class Context {
 public:
  Context(std::string id, ScenarioConfig cfg, const ReproduceOptions& opt)
      : id_(std::move(id)), cfg_(std::move(cfg)), opt_(opt), next_seed_(cfg_.seed) {}

  const ScenarioConfig& cfg() const { return cfg_; }
  std::uint64_t next_seed() { return next_seed_++; }

  detect::TimeTagStream run(const ScenarioConfig& c) {
    return detect::run_trials(c, cfg_.n_trials, next_seed(), opt_.threads);
  }

  std::vector<EstimateRow> simulate(const ScenarioConfig& c, const std::string& label) {
    const auto stream = run(c);
    return pipeline::analyze(stream, counting::window_spec(c), c.hbt, label);
  }

  void row(const std::string& series, double x, double y, double sigma) {
    csv_ += series + "," + text::format_double(x) + "," + text::format_double(y) + "," + text::format_double(sigma) +
            "\n";
  }
  void row(const std::string& series, double x, const CorrelationEstimate& e) { row(series, x, e.value, e.sigma); }

  json& summary() { return summary_; }

  ReproduceResult finish() {
    ReproduceResult r;
    r.id = id_;
    json s;
    s["preset"] = id_;
    s["scenario_hash"] = config::scenario_hash(cfg_);
    s["seed"] = cfg_.seed;
    s["n_trials_per_point"] = cfg_.n_trials;
    for (auto& [k, v] : summary_.items()) s[k] = v;
    r.summary_json = s.dump(2) + "\n";
    const fs::path csv_name = id_ + ".csv";
    const fs::path summary_name = id_ + "_summary.json";
    text::write_file(opt_.out_dir / csv_name, csv_);
    text::write_file(opt_.out_dir / summary_name, r.summary_json);
    r.outputs = {csv_name, summary_name};
    pipeline::write_manifest(opt_.out_dir, "reproduce " + id_, &cfg_, r.outputs);
    return r;
  }

 private:
  std::string id_;
  ScenarioConfig cfg_;
  ReproduceOptions opt_;
  std::uint64_t next_seed_;
  std::string csv_ = "series,x,y,sigma\n";
  json summary_ = json::object();
};

json fit_json(const fit::FitProblem& problem, const fit::FitResult& result) {
  return json::parse(pipeline::fit_result_json(problem, result));
}

// Fits and records; too few usable points is reported, not fatal.
std::optional<fit::FitResult> fit_into(Context& ctx, const std::string& key, fit::FitProblem problem) {
  try {
    problem.validate();
  } catch (const std::invalid_argument& e) {
    ctx.summary()[key] = {{"error", e.what()}};
    return std::nullopt;
  }
  auto result = fit::fit(problem);
  ctx.summary()[key] = fit_json(problem, result);
  return result;
}

void set_param(fit::FitProblem& p, const std::string& name, double value, std::optional<bool> fixed = {}) {
  for (auto& s : p.params) {
    if (s.name != name) continue;
    s.value = value;
    if (fixed) s.fixed = *fixed;
    return;
  }
  throw std::invalid_argument("no parameter " + name);
}

double param(const fit::FitResult& r, const std::string& name) {
  for (std::size_t i = 0; i < r.names.size(); ++i)
    if (r.names[i] == name) return r.params[i];
  throw std::invalid_argument("no parameter " + name);
}

// Conditional D2 click-time histogram (clicks per herald per bin).
void conditional_profile(Context& ctx, const std::string& series, const detect::TimeTagStream& stream,
                         const counting::WindowSpec& w, double t0, double t1, double bin, double t_ref) {
  const auto heralds = counting::trials_with_click(stream, detect::Detector::D1, w.write);
  const int n_bins = static_cast<int>(std::round((t1 - t0) / bin));
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_bins), 0);
  std::size_t h = 0;
  for (const auto& tag : stream.tags) {
    if (tag.detector != detect::Detector::D2) continue;
    while (h < heralds.size() && heralds[h] < tag.trial) ++h;
    if (h == heralds.size()) break;
    if (heralds[h] != tag.trial) continue;
    const int k = static_cast<int>(std::floor((tag.t_us - t0) / bin));
    if (k >= 0 && k < n_bins) ++counts[static_cast<std::size_t>(k)];
  }
  const double n_h = std::max<double>(1.0, static_cast<double>(heralds.size()));
  for (int k = 0; k < n_bins; ++k) {
    const double c = static_cast<double>(counts[static_cast<std::size_t>(k)]);
    ctx.row(series, t0 + (k + 0.5) * bin - t_ref, c / n_h, std::sqrt(c) / n_h);
  }
}

// ---- base scenarios -------------------------------------------------------

ScenarioConfig base(std::string_view id) {
  ScenarioConfig c;
  c.id = std::string(id);
  c.seed = 20170101;
  c.n_trials = 2'000'000;
  if (id == "fig2a") {
    c.hbt = HbtArm::kRead;
  } else if (id == "fig2b") {
    c.n_trials = 4'000'000;
  } else if (id == "fig3a") {
    c.n_trials = 1'000'000;
  } else if (id == "fig3b" || id == "fig4" || id == "sfig5") {
    c.site_b = SiteBMode::kStorage;
    c.timing.t_b_us = 0.5;
    c.n_trials = id == "fig3b" ? 8'000'000 : 3'000'000;
  } else if (id == "fig5") {
    c.timing.t_b_us = 4.0;
    c.n_trials = 20'000;  // coherent pulses per input level
  } else if (id == "sfig1") {
    c.source.p = 0.01;
    c.n_trials = 4'000'000;
  } else if (id == "sfig2") {
    c.n_trials = 100'000;  // probe photons per detuning
  } else if (id == "sfig3") {
    c.timing.t_b_us = 1.0;
    c.n_trials = 200'000;  // input photons per storage time
  } else if (id == "sfig4") {
    c.site_b = SiteBMode::kSlowLight;
    c.source.p = 0.1;
    c.read_noise.prob = 0.015;
    c.n_trials = 10'000'000;
  }
  return c;
}

// ---- presets ----------------------------------------------------------------

// Antibunching before site B vs p(w).
void fig2a(Context& ctx) {
  const auto& cfg = ctx.cfg();
  fit::FitProblem problem = fit::make_problem(fit::ModelId::kAlphaVsPw, {});
  for (double p : pair_probabilities_for_pw(cfg, 5e-4, 0.03, 8)) {
    ScenarioConfig c = cfg;
    c.source.p = p;
    const auto rows = ctx.simulate(c, "p=" + text::format_double(p));
    const auto& pw = pipeline::find_estimate(rows, "p_w");
    try {
      const auto& a = pipeline::find_estimate(rows, "alpha");
      ctx.row("alpha", pw.value, a);
      if (!a.upper_limit) problem.data.push_back({pw.value, a.value, a.sigma});
    } catch (const InsufficientStatistics&) {
    }
  }
  set_param(problem, "c1", 1.0 / effective_source_params(cfg).eta_w);
  fit_into(ctx, "fit_alpha_vs_pw", problem);
}

fit::FitProblem g2_problem(const ScenarioConfig& cfg) {
  const auto eff = effective_source_params(cfg);
  fit::FitProblem problem = fit::make_problem(fit::ModelId::kG2VsPw, {});
  set_param(problem, "c1", 1.0 / eff.eta_w, true);
  set_param(problem, "eta_r", eff.eta_r, true);
  // p_se and eta_a enter almost only as (1/eta_a - 1) p_se; p_se is held
  // at the scenario value so eta_a is identifiable.
  set_param(problem, "p_se", cfg.source.p_se, true);
  set_param(problem, "p_nr", std::max(eff.p_nr, 1e-6));
  return problem;
}

// g2_wr vs p(w), site B bypassed (fig2b) or storing for t_B (fig3b).
void g2_vs_pw(Context& ctx) {
  const auto& cfg = ctx.cfg();
  fit::FitProblem problem = g2_problem(cfg);
  // The noise model drops the thermal +1 of g2 = 1 + 1/p, so the sweep
  // stays at low p(w) where that term is a small correction.
  for (double p : pair_probabilities_for_pw(cfg, 1e-3, 0.02, 8)) {
    ScenarioConfig c = cfg;
    c.source.p = p;
    const auto rows = ctx.simulate(c, "p=" + text::format_double(p));
    const auto& pw = pipeline::find_estimate(rows, "p_w");
    try {
      const auto& g = pipeline::find_estimate(rows, "g2_wr");
      ctx.row("g2_wr", pw.value, g);
      if (!g.upper_limit) problem.data.push_back({pw.value, g.value, g.sigma});
    } catch (const InsufficientStatistics&) {
    }
  }
  ctx.summary()["classical_bound"] = 2.0;
  if (auto r = fit_into(ctx, "fit_g2_vs_pw", problem)) {
    ctx.summary()["eta_a_at_t_a"] = param(*r, "eta_a");
  }
}

// Conditional read-photon profiles: bypass, slow light, storage.
void fig3a(Context& ctx) {
  const auto& cfg = ctx.cfg();
  ScenarioConfig c = cfg;
  // Pair probability for a 2.7% write click probability.
  c.source.p = 0.027 / effective_source_params(cfg).eta_w;
  const double t_in = read_input_center_us(c);
  std::map<std::string, CorrelationEstimate> p_rw;
  for (auto mode : {SiteBMode::kBypass, SiteBMode::kSlowLight, SiteBMode::kStorage}) {
    ScenarioConfig m = c;
    m.site_b = mode;
    const std::string name = mode == SiteBMode::kBypass ? "bypass" : mode == SiteBMode::kSlowLight ? "slow_light" : "storage";
    const auto stream = ctx.run(m);
    const auto w = counting::window_spec(m);
    conditional_profile(ctx, name, stream, w, t_in - 1.0, t_in + 2.5, 0.02, t_in);
    try {
      p_rw[name] = counting::conditional_retrieval(stream, w);
      ctx.summary()["p_r_given_w_" + name] = {{"value", p_rw[name].value}, {"sigma", p_rw[name].sigma}};
    } catch (const InsufficientStatistics&) {
    }
  }
  if (p_rw.count("storage") && p_rw.count("bypass")) {
    const auto eta_b = counting::efficiency_ratio(p_rw["storage"], p_rw["bypass"]);
    ctx.summary()["eta_b"] = {{"value", eta_b.value}, {"sigma", eta_b.sigma}};
  }
  ctx.summary()["read_window_us"] = cfg.windows.read_width_us;
}

// p(r|w) and g2_wr vs t_B (a, b) and vs t_A (c, d).
void fig4(Context& ctx) {
  const auto& cfg = ctx.cfg();
  ScenarioConfig c = cfg;
  c.source.p = 0.02 / effective_source_params(cfg).eta_w;

  ScenarioConfig ref = c;
  ref.site_b = SiteBMode::kBypass;
  const auto ref_rows = ctx.simulate(ref, "bypass");
  const auto p0 = pipeline::find_estimate(ref_rows, "p_r_given_w");
  ctx.summary()["p_r_given_w_bypass"] = {{"value", p0.value}, {"sigma", p0.sigma}};

  fit::FitProblem storage = fit::make_problem(fit::ModelId::kStorageDecay, {});
  set_param(storage, "t_off_us", cfg.storage.t_off_us, true);
  set_param(storage, "p_f1", cfg.storage.p_f1, true);
  set_param(storage, "delta_f_khz", cfg.storage.delta_f_khz);
  for (double tb : linspace(0.3, 9.0, 30)) {
    ScenarioConfig m = c;
    m.timing.t_b_us = tb;
    const auto rows = ctx.simulate(m, "t_b=" + text::format_double(tb));
    try {
      const auto& prw = pipeline::find_estimate(rows, "p_r_given_w");
      ctx.row("a_p_r_given_w", tb, prw);
      const auto eta = counting::efficiency_ratio(prw, p0);
      ctx.row("a_eta_b", tb, eta);
      if (!eta.upper_limit && eta.sigma > 0.0) storage.data.push_back({tb, eta.value, eta.sigma});
      ctx.row("b_g2_wr", tb, pipeline::find_estimate(rows, "g2_wr"));
    } catch (const InsufficientStatistics&) {
    }
  }
  if (auto r = fit_into(ctx, "fit_storage_decay", storage)) {
    ctx.summary()["tau_r_us"] = param(*r, "tau_r_us");
    ctx.summary()["revival_period_us"] = 1e3 / param(*r, "delta_f_khz");
  }

  fit::FitProblem dlcz = fit::make_problem(fit::ModelId::kDlczDecay, {});
  const auto eff = effective_source_params(c);
  set_param(dlcz, "p", c.source.p, true);
  set_param(dlcz, "eta_r", eff.eta_r, true);
  set_param(dlcz, "p_se", c.source.p_se, true);
  set_param(dlcz, "eta_a", c.source.eta_a);
  set_param(dlcz, "p_nr", std::max(eff.p_nr, 1e-6));
  for (double ta : linspace(1.0, 40.0, 14)) {
    ScenarioConfig m = c;
    m.timing.t_a_us = ta;
    const auto rows = ctx.simulate(m, "t_a=" + text::format_double(ta));
    try {
      const auto& prw = pipeline::find_estimate(rows, "p_r_given_w");
      ctx.row("c_p_r_given_w", ta, prw);
      if (!prw.upper_limit) dlcz.data.push_back({ta, prw.value, prw.sigma});
      ctx.row("d_g2_wr", ta, pipeline::find_estimate(rows, "g2_wr"));
    } catch (const InsufficientStatistics&) {
    }
  }
  if (auto r = fit_into(ctx, "fit_dlcz_decay", dlcz)) ctx.summary()["tau_dlcz_us"] = param(*r, "tau_dlcz_us");
}

// Saturation of the stored photon number: N_out / T vs N_in.
void fig5(Context& ctx) {
  const auto& cfg = ctx.cfg();
  Rng rng(ctx.next_seed());
  const double eff = cfg.detectors.d2.efficiency;
  const double pulses = static_cast<double>(cfg.n_trials);
  std::vector<fit::DataPoint> data;
  for (double n_in : {1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0, 75.0, 100.0, 150.0, 200.0, 300.0, 400.0}) {
    const double mean_out = memory::nonlinear_retrieval(n_in, cfg.saturation);
    const double counts = static_cast<double>(rng.poisson(pulses * eff * mean_out));
    const double n_out = counts / (pulses * eff);
    data.push_back({n_in, n_out, std::sqrt(std::max(counts, 1.0)) / (pulses * eff)});
  }
  fit::FitProblem problem = fit::make_problem(fit::ModelId::kSaturation, data);
  auto r = fit_into(ctx, "fit_saturation", problem);
  // Normalise by the fitted small-signal efficiency, as in the figure.
  const double t = r ? param(*r, "t_lin") : cfg.saturation.t_lin;
  for (const auto& d : data) ctx.row("n_out_over_t", d.x, d.y / t, d.sigma / t);
  if (r) {
    ctx.summary()["n_max"] = param(*r, "n_max");
    ctx.summary()["t_lin"] = t;
    ctx.summary()["asymptote_n_out"] = param(*r, "n_max") * t;
  }
}

// Start-stop histogram at low p(w).
void sfig1(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto stream = ctx.run(cfg);
  const auto w = counting::window_spec(cfg);
  const auto h = counting::start_stop_histogram(stream, w);
  for (std::size_t k = 0; k < h.peak_counts.size(); ++k) {
    const double c = static_cast<double>(h.peak_counts[k]);
    ctx.row(k == 0 ? "correlated" : "accidental", static_cast<double>(k), c, std::sqrt(c));
  }
  const auto g = counting::g2_from_histogram(h);
  ctx.summary()["g2_wr"] = {{"value", g.value}, {"sigma", g.sigma}};
  ctx.summary()["n_starts"] = h.n_starts;
}

// Probe transmission with the coupling beam off and on.
void sfig2(Context& ctx) {
  const auto& cfg = ctx.cfg();
  Rng rng(ctx.next_seed());
  const double n_probe = static_cast<double>(cfg.n_trials);
  memory::EitMediumParams off = cfg.medium;
  off.omega_c_mhz = 0.0;
  fit::FitProblem on_fit = fit::make_problem(fit::ModelId::kEitSpectrum, {});
  fit::FitProblem off_fit = fit::make_problem(fit::ModelId::kEitSpectrum, {});
  set_param(off_fit, "omega_c_mhz", 0.0, true);
  set_param(off_fit, "gamma_gr_mhz", cfg.medium.gamma_gr_mhz, true);
  for (double d : linspace(-12.0, 12.0, 97)) {
    for (int on = 0; on < 2; ++on) {
      const double t = memory::transmission(on ? cfg.medium : off, d);
      const double counts = static_cast<double>(rng.poisson(n_probe * t));
      const double y = counts / n_probe;
      const double s = std::sqrt(std::max(counts, 1.0)) / n_probe;
      ctx.row(on ? "coupling_on" : "coupling_off", d, y, s);
      (on ? on_fit : off_fit).data.push_back({d, y, s});
    }
  }
  if (auto r = fit_into(ctx, "fit_coupling_on", on_fit)) {
    memory::EitMediumParams m = cfg.medium;
    m.od = param(*r, "od");
    m.omega_c_mhz = param(*r, "omega_c_mhz");
    m.gamma_gr_mhz = param(*r, "gamma_gr_mhz");
    ctx.summary()["eit_fwhm_mhz"] = memory::eit_window_fwhm(m);
    ctx.summary()["peak_transmission"] = memory::transmission(m, 0.0);
  }
  fit_into(ctx, "fit_coupling_off", off_fit);
}

// Coherent-state slow light and storage (a) and efficiency vs t_T (b).
void sfig3(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const double bin = cfg.waveforms.bin_us;
  const double fwhm = cfg.waveforms.read_fwhm_us;
  const auto input = PulseWaveform::gaussian(0.0, fwhm, bin, -1.0, 3.0);
  const auto& sl = cfg.slow_light;
  const auto slow = input.shifted(sl.delay_us).scaled(sl.transmission * (1.0 - sl.leak_fraction));
  const auto leak = input.scaled(sl.transmission * sl.leak_fraction);
  const double t_total = cfg.timing.t_b_us + cfg.storage.t_off_us;
  const auto retrieved = input.shifted(t_total).scaled(memory::storage_efficiency(cfg.storage, t_total));

  auto value_at = [](const PulseWaveform& w, double t) {
    for (const auto& s : w.samples)
      if (std::abs(s.t_us - t) < 0.5 * w.bin_width_us) return s.intensity;
    return 0.0;
  };
  const double peak = value_at(input, 0.0);
  for (const auto& s : input.samples) {
    const double t = s.t_us;
    ctx.row("a_input", t, s.intensity / peak, 0.0);
    ctx.row("a_slow", t, (value_at(slow, t) + value_at(leak, t)) / peak, 0.0);
    ctx.row("a_leak", t, value_at(leak, t) / peak, 0.0);
    ctx.row("a_retrieved", t, value_at(retrieved, t) / peak, 0.0);
  }
  ctx.summary()["eta_slow"] = (slow.mass() + leak.mass()) / input.mass();
  ctx.summary()["t_total_us"] = memory::centre_of_mass_delay(input, retrieved);
  ctx.summary()["eta_b"] = memory::storage_efficiency(cfg.storage, t_total);

  Rng rng(ctx.next_seed());
  const double n_in = static_cast<double>(cfg.n_trials);
  fit::FitProblem problem = fit::make_problem(fit::ModelId::kStorageDecay, {});
  set_param(problem, "p_f1", cfg.storage.p_f1, true);
  set_param(problem, "delta_f_khz", cfg.storage.delta_f_khz);
  for (double tb : linspace(0.1, 10.0, 45)) {
    const double tt = tb + cfg.storage.t_off_us;
    const double counts = static_cast<double>(rng.poisson(n_in * memory::storage_efficiency(cfg.storage, tt)));
    const double y = counts / n_in;
    const double s = std::sqrt(std::max(counts, 1.0)) / n_in;
    ctx.row("b_eta_b", tt, y, s);
    problem.data.push_back({tt, y, s});
  }
  if (auto r = fit_into(ctx, "fit_storage_decay", problem)) {
    ctx.summary()["tau_r_us"] = param(*r, "tau_r_us");
    ctx.summary()["delta_f_khz"] = param(*r, "delta_f_khz");
  }
}

// Windowed g2_wr across a slowed read photon with overlapping noise.
void sfig4(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto stream = ctx.run(cfg);
  const auto w = counting::window_spec(cfg);
  const double t_in = read_input_center_us(cfg);
  conditional_profile(ctx, "a_slow_light", stream, w, t_in - 0.8, t_in + 1.6, 0.02, t_in);
  const double width = 0.123;
  for (double tw : linspace(-0.4, 1.2, 17)) {
    try {
      ctx.row("b_g2_wr", tw, counting::windowed_g2(stream, w, t_in + tw, width));
    } catch (const InsufficientStatistics&) {
    }
  }
  ctx.summary()["window_us"] = width;
  ctx.summary()["classical_bound"] = 2.0;
}

// Storage efficiency vs coupling detuning and the linewidth deconvolution.
void sfig5(Context& ctx) {
  const auto& cfg = ctx.cfg();
  ScenarioConfig c = cfg;
  c.source.p = 0.02 / effective_source_params(cfg).eta_w;
  // Detuning response: the EIT line convolved with a transform-limited read
  // photon of the configured duration.
  const double fwhm_eit = memory::eit_window_fwhm(cfg.medium);
  const double fwhm_photon = 4.0 * std::log(2.0) / (2.0 * constants::kPi * cfg.waveforms.read_fwhm_us);
  const double sigma = std::hypot(fwhm_eit, fwhm_photon) / kFwhmPerSigma;

  fit::FitProblem problem = fit::make_problem(fit::ModelId::kGaussianLine, {});
  double y_max = 0.0;
  for (double d : linspace(-4.0, 4.0, 17)) {
    ScenarioConfig m = c;
    m.storage.eta0 = cfg.storage.eta0 * std::exp(-0.5 * d * d / (sigma * sigma));
    const auto rows = ctx.simulate(m, "delta_c=" + text::format_double(d));
    try {
      const auto& prw = pipeline::find_estimate(rows, "p_r_given_w");
      ctx.row("p_r_given_w", d, prw);
      if (!prw.upper_limit) problem.data.push_back({d, prw.value, prw.sigma});
      y_max = std::max(y_max, prw.value);
    } catch (const InsufficientStatistics&) {
    }
  }
  set_param(problem, "amplitude", y_max);
  set_param(problem, "sigma", 1.0);
  set_param(problem, "baseline", 0.0, false);
  if (auto r = fit_into(ctx, "fit_gaussian_line", problem)) {
    const double fwhm = kFwhmPerSigma * param(*r, "sigma");
    ctx.summary()["fwhm_mhz"] = fwhm;
    ctx.summary()["fwhm_eit_mhz"] = fwhm_eit;
    try {
      ctx.summary()["fwhm_photon_mhz"] = memory::memory_linewidth_deconvolve(fwhm, fwhm_eit);
    } catch (const std::invalid_argument&) {
    }
  }
}

using PresetFn = std::function<void(Context&)>;

const std::map<std::string, PresetFn, std::less<>>& registry() {
  static const std::map<std::string, PresetFn, std::less<>> r = {
      {"fig2a", fig2a}, {"fig2b", g2_vs_pw}, {"fig3a", fig3a}, {"fig3b", g2_vs_pw},
      {"fig4", fig4},   {"fig5", fig5},      {"sfig1", sfig1}, {"sfig2", sfig2},
      {"sfig3", sfig3}, {"sfig4", sfig4},    {"sfig5", sfig5},
  };
  return r;
}

std::string available_list() {
  std::string s;
  for (const auto& id : available()) s += (s.empty() ? "" : ", ") + id;
  return s;
}

}  // namespace

UnknownPreset::UnknownPreset(const std::string& id)
    : std::invalid_argument("unknown preset '" + id + "'; available: " + available_list()) {}

const std::vector<std::string>& available() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return ids;
}

ScenarioConfig base_config(std::string_view id) {
  if (!registry().count(id)) throw UnknownPreset(std::string(id));
  return base(id);
}

ReproduceResult reproduce(std::string_view id, const ReproduceOptions& options) {
  ScenarioConfig cfg = base_config(id);
  if (options.n_trials) cfg.n_trials = *options.n_trials;
  if (options.seed) cfg.seed = *options.seed;
  require_valid(cfg);
  Context ctx(std::string(id), cfg, options);
  registry().find(id)->second(ctx);
  return ctx.finish();
}

}  // namespace rydsim::presets

#include "rydsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rydsim/errors.hpp"

namespace rydsim::detect {

std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::D1:
      return "D1";
    case Detector::D2:
      return "D2";
    case Detector::D3:
      return "D3";
    case Detector::D4:
      return "D4";
  }
  return "D?";
}

Detector parse_detector(std::string_view s) {
  if (s == "D1") return Detector::D1;
  if (s == "D2") return Detector::D2;
  if (s == "D3") return Detector::D3;
  if (s == "D4") return Detector::D4;
  throw std::invalid_argument("unknown detector id '" + std::string(s) + "'");
}

bool tag_less(const TimeTag& a, const TimeTag& b) {
  if (a.trial != b.trial) return a.trial < b.trial;
  if (a.t_us != b.t_us) return a.t_us < b.t_us;
  return a.detector < b.detector;
}

bool TimeTagStream::is_sorted() const { return std::is_sorted(tags.begin(), tags.end(), tag_less); }

PairSample sample_pair(double p, Rng& rng) {
  // P(n >= k) = p^k, so n = floor(log u / log p) for u uniform on (0, 1].
  const double u = rng.uniform_pos();
  const int n = (u >= 1.0) ? 0 : static_cast<int>(std::floor(std::log(u) / std::log(p)));
  return {n, n};
}

int thin(int n, double eta, Rng& rng) {
  if (eta >= 1.0) return n;
  int k = 0;
  for (int i = 0; i < n; ++i) k += rng.bernoulli(eta) ? 1 : 0;
  return k;
}

bool thin_and_darken(int n, const SpdParams& spd, Rng& rng) {
  const bool photon = thin(n, spd.efficiency, rng) >= 1;
  const bool dark = rng.bernoulli(spd.dark_prob_per_gate);
  return photon || dark;
}

WaveformSampler::WaveformSampler(const PulseWaveform& shape) : bin_width_(shape.bin_width_us) {
  shape.validate();
  cdf_.reserve(shape.samples.size());
  t_.reserve(shape.samples.size());
  double acc = 0.0;
  for (const auto& s : shape.samples) {
    acc += s.intensity;
    cdf_.push_back(acc);
    t_.push_back(s.t_us);
  }
  if (!(acc > 0.0)) throw std::invalid_argument("cannot sample a zero-mass waveform");
  for (auto& c : cdf_) c /= acc;
}

double WaveformSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  const auto i = static_cast<std::size_t>(it - cdf_.begin());
  return t_[i] + (rng.uniform() - 0.5) * bin_width_;
}

double waveform_time_sampler(const PulseWaveform& shape, Rng& rng) { return WaveformSampler(shape)(rng); }

namespace {

struct Gate {
  double lo = 0.0;
  double width = 0.0;
  double draw(Rng& rng) const { return lo + rng.uniform() * width; }
};

Gate centered_gate(double center, double width) { return {center - 0.5 * width, width}; }

const SpdParams& spd_of(const DetectorSet& set, Detector d) {
  switch (d) {
    case Detector::D1:
      return set.d1;
    case Detector::D2:
      return set.d2;
    case Detector::D3:
      return set.d3;
    case Detector::D4:
      return set.d4;
  }
  return set.d1;
}

// Everything run_trials needs per trial, precomputed once.
class TrialEngine {
 public:
  explicit TrialEngine(const ScenarioConfig& cfg)
      : cfg_(cfg),
        write_shape_(make_gaussian(cfg.timing.write_center_us, cfg.waveforms.write_fwhm_us, cfg.waveforms.bin_us)),
        read_in_shape_(make_gaussian(read_input_center_us(cfg), cfg.waveforms.read_fwhm_us, cfg.waveforms.bin_us)),
        read_main_shape_(make_gaussian(read_input_center_us(cfg) + site_b_delay_us(cfg),
                                       cfg.waveforms.read_fwhm_us, cfg.waveforms.bin_us)),
        noise_shape_(make_gaussian(read_input_center_us(cfg) + cfg.read_noise.center_offset_us,
                                   cfg.read_noise.fwhm_us, cfg.waveforms.bin_us)),
        transfer_(site_b_transfer(cfg)),
        eta_a_t_(source::retrieval_efficiency(cfg.source, cfg.timing.t_a_us)) {
    const double wc = cfg.timing.write_center_us;
    const double rc = read_window_center_us(cfg);
    write_window_ = centered_gate(wc, cfg.windows.write_width_us);
    read_window_ = centered_gate(rc, cfg.windows.read_width_us);
    if (cfg.hbt == HbtArm::kWrite) {
      write_dets_ = {Detector::D3, Detector::D4};
      read_dets_ = {Detector::D2};
    } else if (cfg.hbt == HbtArm::kRead) {
      write_dets_ = {Detector::D1};
      read_dets_ = {Detector::D3, Detector::D4};
    } else {
      write_dets_ = {Detector::D1};
      read_dets_ = {Detector::D2};
    }
    p_random_ = cfg.source.p * (1.0 - eta_a_t_) * cfg.source.p_se;
  }

  void run(std::uint64_t trial, std::uint64_t seed, std::vector<TimeTag>& out) const {
    Rng rng = Rng::substream(seed, trial);
    const std::size_t first = out.size();
    const auto& src = cfg_.source;
    const PairSample pair = sample_pair(src.p, rng);

    // Write arm.
    const int n_w = thin(pair.n_write, src.eta_w, rng);
    deliver(n_w, write_dets_, write_shape_, trial, rng, out);
    for (Detector d : write_dets_) {
      if (src.p_nw > 0.0 && rng.bernoulli(src.p_nw)) out.push_back({d, trial, write_window_.draw(rng)});
      add_dark(d, cfg_.timing.write_center_us, trial, rng, out);
    }

    // Read arm: directional retrieval plus the random-emission branch, both
    // passing site B and the read path.
    int n_r = thin(pair.n_read, eta_a_t_, rng);
    if (p_random_ > 0.0 && rng.bernoulli(p_random_)) ++n_r;
    for (int j = 0; j < n_r; ++j) {
      const double u = rng.uniform();
      const WaveformSampler* shape = nullptr;
      if (u < transfer_.main) {
        shape = &read_main_shape_;
      } else if (u < transfer_.main + transfer_.leak) {
        shape = &read_in_shape_;
      } else {
        continue;
      }
      if (!rng.bernoulli(src.eta_r)) continue;
      deliver(1, read_dets_, *shape, trial, rng, out);
    }
    if (cfg_.read_noise.prob > 0.0 && rng.bernoulli(cfg_.read_noise.prob)) {
      deliver(1, read_dets_, noise_shape_, trial, rng, out);
    }
    const double rc = read_window_.lo + 0.5 * read_window_.width;
    for (Detector d : read_dets_) {
      if (src.p_nr > 0.0 && rng.bernoulli(src.p_nr)) out.push_back({d, trial, read_window_.draw(rng)});
      add_dark(d, rc, trial, rng, out);
    }

    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(), tag_less);
  }

 private:
  static WaveformSampler make_gaussian(double center, double fwhm, double bin) {
    return WaveformSampler(PulseWaveform::gaussian(center, fwhm, bin, center - 2.0 * fwhm, center + 2.0 * fwhm));
  }

  // Splits `n` photons over the detectors (50:50 for two) and applies each
  // detector's efficiency; every detected photon leaves its own tag.
  void deliver(int n, const std::vector<Detector>& dets, const WaveformSampler& shape, std::uint64_t trial,
               Rng& rng, std::vector<TimeTag>& out) const {
    for (int i = 0; i < n; ++i) {
      Detector d = dets.front();
      if (dets.size() == 2 && rng.bernoulli(0.5)) d = dets.back();
      if (rng.bernoulli(spd_of(cfg_.detectors, d).efficiency)) out.push_back({d, trial, shape(rng)});
    }
  }

  void add_dark(Detector d, double gate_center, std::uint64_t trial, Rng& rng, std::vector<TimeTag>& out) const {
    const auto& spd = spd_of(cfg_.detectors, d);
    if (spd.dark_prob_per_gate > 0.0 && rng.bernoulli(spd.dark_prob_per_gate)) {
      out.push_back({d, trial, centered_gate(gate_center, spd.gate_width_us).draw(rng)});
    }
  }

  const ScenarioConfig& cfg_;
  WaveformSampler write_shape_;
  WaveformSampler read_in_shape_;
  WaveformSampler read_main_shape_;
  WaveformSampler noise_shape_;
  SiteBTransfer transfer_;
  double eta_a_t_ = 0.0;
  double p_random_ = 0.0;
  Gate write_window_;
  Gate read_window_;
  std::vector<Detector> write_dets_;
  std::vector<Detector> read_dets_;
};

}  // namespace

TimeTagStream run_trials(const ScenarioConfig& cfg, std::uint64_t n_trials, std::uint64_t seed, int threads) {
  require_valid(cfg);
  if (n_trials < 1) throw ConfigError({"n_trials must be >= 1"});
  const TrialEngine engine(cfg);

  const auto n_workers = static_cast<std::uint64_t>(std::clamp(threads, 1, 256));
  const std::uint64_t chunk = (n_trials + n_workers - 1) / n_workers;
  std::vector<std::vector<TimeTag>> parts(n_workers);
  auto work = [&](std::uint64_t w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(n_trials, begin + chunk);
    for (std::uint64_t i = begin; i < end; ++i) engine.run(i, seed, parts[w]);
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::uint64_t w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
  }

  TimeTagStream stream;
  stream.trial_count = n_trials;
  stream.trial_period_us = cfg.timing.trial_period_us;
  stream.seed = seed;
  stream.scenario_id = cfg.id;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  stream.tags.reserve(total);
  for (auto& p : parts) stream.tags.insert(stream.tags.end(), p.begin(), p.end());
  return stream;
}

TimeTagStream merge_streams(const TimeTagStream& a, const TimeTagStream& b) {
  if (a.trial_period_us != b.trial_period_us) throw std::invalid_argument("cannot merge streams with different trial periods");
  TimeTagStream out = a;
  out.tags.reserve(a.tags.size() + b.tags.size());
  for (TimeTag t : b.tags) {
    t.trial += a.trial_count;
    out.tags.push_back(t);
  }
  out.trial_count = a.trial_count + b.trial_count;
  return out;
}

}  // namespace rydsim::detect

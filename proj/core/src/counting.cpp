#include "rydsim/counting.hpp"

#include <cmath>
#include <stdexcept>

#include "rydsim/errors.hpp"
#include "rydsim/text_format.hpp"

namespace rydsim::counting {
namespace {

std::uint64_t count_shifted_overlap(const std::vector<std::uint64_t>& starts, const std::vector<std::uint64_t>& stops,
                                    std::uint64_t offset) {
  std::uint64_t n = 0;
  std::size_t j = 0;
  for (std::uint64_t s : starts) {
    const std::uint64_t target = s + offset;
    while (j < stops.size() && stops[j] < target) ++j;
    if (j == stops.size()) break;
    if (stops[j] == target) ++n;
  }
  return n;
}

double safe_inv(std::uint64_t n) { return n > 0 ? 1.0 / static_cast<double>(n) : 0.0; }

}  // namespace

void WindowSpec::validate() const {
  if (!(write.width_us > 0.0) || !(read.width_us > 0.0)) throw std::invalid_argument("window widths must be > 0");
  if (n_accidental_peaks < 1) throw std::invalid_argument("need at least one accidental peak");
}

WindowSpec window_spec(const ScenarioConfig& cfg) {
  WindowSpec w;
  w.write = {cfg.timing.write_center_us, cfg.windows.write_width_us};
  w.read = {read_window_center_us(cfg), cfg.windows.read_width_us};
  w.n_accidental_peaks = cfg.windows.n_accidental_peaks;
  return w;
}

std::vector<std::uint64_t> trials_with_click(const TimeTagStream& stream, Detector det, const Gate& gate) {
  std::vector<std::uint64_t> out;
  for (const auto& tag : stream.tags) {
    if (tag.detector != det || !gate.contains(tag.t_us)) continue;
    if (out.empty() || out.back() != tag.trial) out.push_back(tag.trial);
  }
  return out;
}

CoincidenceHistogram start_stop_histogram(const TimeTagStream& stream, const Gate& start_gate, Detector start,
                                          const Gate& stop_gate, Detector stop, int n_accidental_peaks) {
  if (n_accidental_peaks < 1) throw std::invalid_argument("need at least one accidental peak");
  const auto starts = trials_with_click(stream, start, start_gate);
  const auto stops = trials_with_click(stream, stop, stop_gate);
  CoincidenceHistogram h;
  h.n_starts = starts.size();
  h.peak_counts.resize(static_cast<std::size_t>(n_accidental_peaks) + 1);
  for (std::size_t k = 0; k < h.peak_counts.size(); ++k) h.peak_counts[k] = count_shifted_overlap(starts, stops, k);
  return h;
}

CoincidenceHistogram start_stop_histogram(const TimeTagStream& stream, const WindowSpec& w, Detector start,
                                          Detector stop) {
  w.validate();
  return start_stop_histogram(stream, w.write, start, w.read, stop, w.n_accidental_peaks);
}

CorrelationEstimate g2_from_histogram(const CoincidenceHistogram& h) {
  if (h.peak_counts.size() < 2) throw std::invalid_argument("histogram needs at least one accidental peak");
  std::uint64_t acc_total = 0;
  for (std::size_t k = 1; k < h.peak_counts.size(); ++k) acc_total += h.peak_counts[k];
  if (acc_total == 0) throw InsufficientStatistics("no accidental coincidences: g2 is undefined");
  const double acc_mean = static_cast<double>(acc_total) / static_cast<double>(h.peak_counts.size() - 1);
  const std::uint64_t c0 = h.peak_counts[0];

  CorrelationEstimate e;
  e.n_coinc = c0;
  if (c0 == 0) {
    e.value = 0.0;
    e.sigma = kZeroCountUpperLimit / acc_mean;
    e.upper_limit = true;
    return e;
  }
  e.value = static_cast<double>(c0) / acc_mean;
  e.sigma = e.value * std::sqrt(safe_inv(c0) + safe_inv(acc_total));
  return e;
}

CorrelationEstimate conditional_retrieval(const TimeTagStream& stream, const WindowSpec& w, Detector herald,
                                          Detector stop) {
  const auto h = start_stop_histogram(stream, w.write, herald, w.read, stop, 1);
  if (h.n_starts == 0) throw InsufficientStatistics("no heralds: p(r|w) is undefined");
  const double n = static_cast<double>(h.n_starts);
  CorrelationEstimate e;
  e.n_coinc = h.peak_counts[0];
  e.value = static_cast<double>(e.n_coinc) / n;
  if (e.n_coinc == 0) {
    e.sigma = kZeroCountUpperLimit / n;
    e.upper_limit = true;
  } else {
    e.sigma = std::sqrt(e.value * (1.0 - e.value) / n);
  }
  return e;
}

CorrelationEstimate efficiency_ratio(const CorrelationEstimate& with_memory, const CorrelationEstimate& reference) {
  if (!(reference.value > 0.0)) throw InsufficientStatistics("reference probability is zero");
  CorrelationEstimate e;
  e.value = with_memory.value / reference.value;
  e.n_coinc = with_memory.n_coinc;
  e.upper_limit = with_memory.upper_limit;
  const double rel_ref = reference.sigma / reference.value;
  if (with_memory.value > 0.0) {
    const double rel = with_memory.sigma / with_memory.value;
    e.sigma = e.value * std::sqrt(rel * rel + rel_ref * rel_ref);
  } else {
    e.sigma = with_memory.sigma / reference.value;
  }
  return e;
}

CorrelationEstimate antibunching_estimator(const TimeTagStream& stream, const WindowSpec& w, Detector herald,
                                           Detector a, Detector b) {
  w.validate();
  const auto heralds = trials_with_click(stream, herald, w.write);
  if (heralds.empty()) throw InsufficientStatistics("no heralds: alpha is undefined");
  const auto ta = trials_with_click(stream, a, w.read);
  const auto tb = trials_with_click(stream, b, w.read);

  std::uint64_t n_a = 0, n_b = 0, n_ab = 0;
  std::size_t ia = 0, ib = 0;
  for (std::uint64_t h : heralds) {
    while (ia < ta.size() && ta[ia] < h) ++ia;
    while (ib < tb.size() && tb[ib] < h) ++ib;
    const bool ca = ia < ta.size() && ta[ia] == h;
    const bool cb = ib < tb.size() && tb[ib] == h;
    n_a += ca;
    n_b += cb;
    n_ab += (ca && cb);
  }
  if (n_a == 0 || n_b == 0) throw InsufficientStatistics("no heralded clicks on one HBT arm: alpha is undefined");

  const double n_w = static_cast<double>(heralds.size());
  const double norm = n_w / (static_cast<double>(n_a) * static_cast<double>(n_b));
  CorrelationEstimate e;
  e.n_coinc = n_ab;
  if (n_ab == 0) {
    e.value = 0.0;
    e.sigma = kZeroCountUpperLimit * norm;
    e.upper_limit = true;
    return e;
  }
  e.value = static_cast<double>(n_ab) * norm;
  e.sigma = e.value * std::sqrt(safe_inv(n_ab) + safe_inv(n_a) + safe_inv(n_b) + 1.0 / n_w);
  return e;
}

CorrelationEstimate autocorrelation_estimator(const TimeTagStream& stream, Detector a, Detector b, const Gate& gate) {
  if (stream.trial_count == 0) throw InsufficientStatistics("empty stream");
  const auto ta = trials_with_click(stream, a, gate);
  const auto tb = trials_with_click(stream, b, gate);
  if (ta.empty() || tb.empty()) throw InsufficientStatistics("no clicks on one arm: autocorrelation is undefined");
  const std::uint64_t n_ab = count_shifted_overlap(ta, tb, 0);
  const double n = static_cast<double>(stream.trial_count);
  const double norm = n / (static_cast<double>(ta.size()) * static_cast<double>(tb.size()));
  CorrelationEstimate e;
  e.n_coinc = n_ab;
  if (n_ab == 0) {
    e.sigma = kZeroCountUpperLimit * norm;
    e.upper_limit = true;
    return e;
  }
  e.value = static_cast<double>(n_ab) * norm;
  e.sigma = e.value * std::sqrt(safe_inv(n_ab) + safe_inv(ta.size()) + safe_inv(tb.size()));
  return e;
}

CorrelationEstimate cauchy_schwarz(const CorrelationEstimate& gwr, const CorrelationEstimate& gww,
                                   const CorrelationEstimate& grr) {
  if (!(gww.value > 0.0) || !(grr.value > 0.0))
    throw std::invalid_argument("Cauchy-Schwarz parameter needs positive autocorrelations");
  CorrelationEstimate e;
  e.value = gwr.value * gwr.value / (gww.value * grr.value);
  const double r_wr = gwr.value != 0.0 ? gwr.sigma / gwr.value : 0.0;
  const double r_ww = gww.sigma / gww.value;
  const double r_rr = grr.sigma / grr.value;
  e.sigma = e.value * std::sqrt(4.0 * r_wr * r_wr + r_ww * r_ww + r_rr * r_rr);
  e.n_coinc = gwr.n_coinc;
  return e;
}

CorrelationEstimate windowed_g2(const TimeTagStream& stream, const WindowSpec& w, double t_w_us, double width_us,
                                Detector start, Detector stop) {
  if (!(width_us > 0.0)) throw std::invalid_argument("window width must be > 0");
  const Gate stop_gate{t_w_us, width_us};
  return g2_from_histogram(start_stop_histogram(stream, w.write, start, stop_gate, stop, w.n_accidental_peaks));
}

std::string estimates_to_csv(const std::vector<EstimateRow>& rows) {
  std::string out = "quantity,value,sigma,n_coinc,scenario\n";
  for (const auto& r : rows) {
    out += r.quantity + "," + text::format_double(r.estimate.value) + "," + text::format_double(r.estimate.sigma) +
           "," + std::to_string(r.estimate.n_coinc) + "," + r.scenario + "\n";
  }
  return out;
}

}  // namespace rydsim::counting

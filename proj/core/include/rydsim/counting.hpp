#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rydsim/detection.hpp"
#include "rydsim/scenario.hpp"

// Coincidence-counting estimators computed from raw time-tag streams:
// start-stop histograms normalised by accidental peaks, conditional
// probabilities, heralded and unheralded autocorrelations and the
// Cauchy-Schwarz parameter, with first-order Poisson error propagation.
//
// A detector counts at most once per trial and gate (threshold detection).
namespace rydsim::counting {

using detect::Detector;
using detect::TimeTagStream;

struct Gate {
  double center_us = 0.0;
  double width_us = 0.0;

  bool contains(double t_us) const {
    return t_us >= center_us - 0.5 * width_us && t_us < center_us + 0.5 * width_us;
  }
};

struct WindowSpec {
  Gate write{0.1, 0.06};
  Gate read{1.1, 0.6};
  int n_accidental_peaks = 6;

  void validate() const;
};

/// Write gate at the write-pulse centre, read gate at the expected read
/// arrival, widths and peak count from the scenario.
WindowSpec window_spec(const ScenarioConfig& cfg);

/// Counts per trial offset: peak_counts[k] pairs a start in trial i with a
/// stop in trial i + k. Peak 0 holds the correlated coincidences.
struct CoincidenceHistogram {
  std::vector<std::uint64_t> peak_counts;
  std::uint64_t n_starts = 0;
};

struct CorrelationEstimate {
  double value = 0.0;
  double sigma = 0.0;  ///< one standard deviation; a 68% upper bound if upper_limit
  std::uint64_t n_coinc = 0;
  bool upper_limit = false;  ///< set when no coincidences were observed
};

/// -ln(0.32): the 68% one-sided Poisson upper limit for zero observed counts.
inline constexpr double kZeroCountUpperLimit = 1.1394343053358244;

/// Sorted indices of trials with at least one click of `det` inside `gate`.
std::vector<std::uint64_t> trials_with_click(const TimeTagStream& stream, Detector det, const Gate& gate);

CoincidenceHistogram start_stop_histogram(const TimeTagStream& stream, const Gate& start_gate, Detector start,
                                          const Gate& stop_gate, Detector stop, int n_accidental_peaks);

/// Start on the write gate, stop on the read gate.
CoincidenceHistogram start_stop_histogram(const TimeTagStream& stream, const WindowSpec& w,
                                          Detector start = Detector::D1, Detector stop = Detector::D2);

/// C_0 / mean(C_1..C_K). Throws InsufficientStatistics when every
/// accidental peak is empty.
CorrelationEstimate g2_from_histogram(const CoincidenceHistogram& h);

/// p(r|w) = coincidences / heralds with a binomial error.
CorrelationEstimate conditional_retrieval(const TimeTagStream& stream, const WindowSpec& w,
                                          Detector herald = Detector::D1, Detector stop = Detector::D2);

/// Ratio of two conditional probabilities, e.g. eta_B = p(r|w) / p0(r|w).
CorrelationEstimate efficiency_ratio(const CorrelationEstimate& with_memory, const CorrelationEstimate& reference);

/// alpha = p(r3, r4 | w) / (p(r3 | w) p(r4 | w)) from an HBT stream.
CorrelationEstimate antibunching_estimator(const TimeTagStream& stream, const WindowSpec& w,
                                           Detector herald = Detector::D1, Detector a = Detector::D3,
                                           Detector b = Detector::D4);

/// Unheralded g2 = p(a, b) / (p(a) p(b)) of a split mode, both detectors
/// gated by `gate`.
CorrelationEstimate autocorrelation_estimator(const TimeTagStream& stream, Detector a, Detector b, const Gate& gate);

/// R = g2_wr^2 / (g2_ww g2_rr).
CorrelationEstimate cauchy_schwarz(const CorrelationEstimate& gwr, const CorrelationEstimate& gww,
                                   const CorrelationEstimate& grr);

/// g2_wr with the stop gate narrowed to `width_us` around `t_w_us`.
CorrelationEstimate windowed_g2(const TimeTagStream& stream, const WindowSpec& w, double t_w_us,
                                double width_us = 0.123, Detector start = Detector::D1,
                                Detector stop = Detector::D2);

struct EstimateRow {
  std::string quantity;
  CorrelationEstimate estimate;
  std::string scenario;
};

/// CSV with header `quantity,value,sigma,n_coinc,scenario`.
std::string estimates_to_csv(const std::vector<EstimateRow>& rows);

}  // namespace rydsim::counting

#include "rydsim/photon_source.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rydsim/constants.hpp"

namespace rydsim::source {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

void DlczSourceParams::validate() const {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "source.p must lie in (0, 1)");
  require(is_probability(eta_w), "source.eta_w must lie in [0, 1]");
  require(is_probability(eta_r), "source.eta_r must lie in [0, 1]");
  require(is_probability(eta_a), "source.eta_a must lie in [0, 1]");
  require(is_probability(p_se), "source.p_se must lie in [0, 1]");
  require(is_probability(p_nw) && p_nw < 1.0, "source.p_nw must lie in [0, 1)");
  require(is_probability(p_nr) && p_nr < 1.0, "source.p_nr must lie in [0, 1)");
  require(std::isfinite(tau_dlcz_us) && tau_dlcz_us > 0.0, "source.tau_dlcz_us must be > 0");
  require(n_max == 0 || n_max >= 2, "source.n_max must be 0 (auto) or >= 2");
}

int DlczSourceParams::fock_cutoff() const { return n_max > 0 ? n_max : default_fock_cutoff(p); }

double PairNumberDistribution::total() const {
  double s = 0.0;
  for (double pn : probs) s += pn;
  return s;
}

double PairNumberDistribution::mean() const {
  double s = 0.0;
  for (std::size_t n = 0; n < probs.size(); ++n) s += static_cast<double>(n) * probs[n];
  return s;
}

int default_fock_cutoff(double p) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  int n = std::max(2, static_cast<int>(std::ceil(std::log(1e-12) / std::log(p))) - 1);
  while (std::pow(p, n + 1) >= 1e-12) ++n;
  while (n > 2 && std::pow(p, n) < 1e-12) --n;
  return n;
}

PairNumberDistribution pair_number_distribution(double p, int n_max) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  require(n_max >= 2, "n_max must be >= 2");
  PairNumberDistribution d;
  d.probs.resize(static_cast<std::size_t>(n_max) + 1);
  double pn = 1.0 - p;
  for (auto& prob : d.probs) {
    prob = pn;
    pn *= p;
  }
  return d;
}

double ideal_cross_correlation(double p) {
  require(std::isfinite(p) && p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
  return 1.0 + 1.0 / p;
}

double ideal_antibunching(double p) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  return 2.0 * p * (2.0 + p) / ((1.0 + p) * (1.0 + p));
}

double retrieval_efficiency(const DlczSourceParams& params, double t_a_us) {
  require(std::isfinite(t_a_us) && t_a_us >= 0.0, "t_A must be >= 0");
  const double x = t_a_us / params.tau_dlcz_us;
  return params.eta_a * std::exp(-x * x);
}

DetectionProbabilities detection_probabilities(const DlczSourceParams& params, double t_a_us) {
  params.validate();
  const double eta_a_t = retrieval_efficiency(params, t_a_us);
  const double p = params.p;

  DetectionProbabilities out;
  out.write = p * params.eta_w + params.p_nw;
  const double directional = eta_a_t * params.eta_r;
  const double random = p * (1.0 - eta_a_t) * params.p_se * params.eta_r;
  out.read = p * directional + random + params.p_nr;
  out.joint = out.write * directional + out.write * random + out.write * params.p_nr;
  return out;
}

double motional_coherence_time(double mass_kg, double temperature_k, double delta_k_per_m) {
  require(std::isfinite(mass_kg) && mass_kg > 0.0, "mass must be > 0");
  require(std::isfinite(temperature_k) && temperature_k > 0.0, "temperature must be > 0");
  require(std::isfinite(delta_k_per_m) && delta_k_per_m > 0.0, "delta_k must be > 0");
  return std::sqrt(mass_kg / (constants::kBoltzmann * temperature_k)) / delta_k_per_m;
}

}  // namespace rydsim::source

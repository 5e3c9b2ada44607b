#pragma once

#include <vector>

// Closed-form model of the DLCZ write/read photon-pair source: two-mode
// squeezed pair statistics, ideal correlation functions and the
// noise-dressed detection probabilities used by every fit of the source.
namespace rydsim::source {

/// Effective parameters of the DLCZ source (site A).
///
/// Efficiencies are probabilities in [0, 1]; `p_nw` and `p_nr` are background
/// click probabilities per detection gate. `tau_dlcz_us` is the 1/e time of
/// the Gaussian decay of the intrinsic retrieval efficiency.
struct DlczSourceParams {
  double p = 0.01;            ///< spin-wave (pair) excitation probability, (0, 1)
  double eta_w = 0.5;         ///< write-photon detection efficiency
  double eta_r = 0.7;         ///< read-path transmission (and detection)
  double eta_a = 0.385;       ///< intrinsic retrieval efficiency at t_A = 0
  double p_se = 0.1;          ///< random (spontaneous) read-mode branching
  double p_nw = 1e-5;         ///< write-gate background click probability
  double p_nr = 1e-5;         ///< read-gate background click probability
  double tau_dlcz_us = 24.0;  ///< spin-wave coherence time, microseconds
  int n_max = 0;              ///< Fock cutoff; 0 selects default_fock_cutoff(p)

  /// Throws std::invalid_argument naming the first field out of range.
  void validate() const;
  int fock_cutoff() const;
};

/// Joint photon-number distribution of the write and read modes. The modes
/// are perfectly correlated, so `probs[n]` is P(n_w = n_r = n).
struct PairNumberDistribution {
  std::vector<double> probs;

  double total() const;
  double mean() const;
};

/// Smallest cutoff whose truncated tail mass p^(n_max+1) stays below 1e-12.
int default_fock_cutoff(double p);

/// P(n) = (1 - p) p^n for n = 0..n_max.
PairNumberDistribution pair_number_distribution(double p, int n_max);

/// g2_wr = 1 + 1/p for the two-mode squeezed state.
double ideal_cross_correlation(double p);

/// Heralded autocorrelation of the read mode, 2p(2 + p)/(1 + p)^2.
double ideal_antibunching(double p);

struct DetectionProbabilities {
  double write = 0.0;  ///< p(w)
  double read = 0.0;   ///< p(r)
  double joint = 0.0;  ///< p(w, r)

  double cross_correlation() const { return joint / (write * read); }
  double conditional_read() const { return joint / write; }
};

/// eta_A(t) = eta_A exp(-t^2 / tau_dlcz^2).
double retrieval_efficiency(const DlczSourceParams& params, double t_a_us);

/// Detection probabilities of the noise model (directional retrieval,
/// random emission and background) after a spin-wave storage time t_A.
DetectionProbabilities detection_probabilities(const DlczSourceParams& params, double t_a_us);

/// Motional-dephasing coherence time sqrt(m / (k_B T dk^2)), in seconds.
double motional_coherence_time(double mass_kg, double temperature_k, double delta_k_per_m);

}  // namespace rydsim::source

#pragma once

#include <complex>
#include <cstdint>

#include "rydsim/constants.hpp"
#include "rydsim/waveform.hpp"

// Site-B physics: ladder-EIT susceptibility, slow light, storage and
// retrieval with motional dephasing and hyperfine beating, and the
// effective saturation law of the blockaded medium.
//
// Rates and detunings are ordinary frequencies in MHz and enter the
// susceptibility exactly as written; times are in microseconds.
namespace rydsim::memory {

struct EitMediumParams {
  double od = 5.4;
  double gamma_mhz = constants::kGammaD2MHz;  ///< excited-state linewidth
  double omega_c_mhz = 2.66;                  ///< coupling Rabi frequency
  double gamma_gr_mhz = 0.29;                 ///< ground-Rydberg dephasing
  double k_p_per_m = constants::wavenumber(constants::kWavelengthD2);
  double length_m = 1e-3;

  void validate() const;
};

struct StorageParams {
  double eta0 = 0.05;         ///< zero-time storage-and-retrieval efficiency
  double tau_r_us = 3.3;      ///< Gaussian 1/e coherence time
  double delta_f_khz = 182.3; ///< Rydberg hyperfine splitting
  double p_f1 = 0.6;          ///< weight of the F=1 hyperfine component
  double t_off_us = 0.47;     ///< offset between storage time and total time t_T

  void validate() const;
};

struct SaturationParams {
  double n_max = 68.0;    ///< maximum number of storable photons
  double t_lin = 0.0044;  ///< small-signal storage efficiency

  void validate() const;
};

/// chi(delta) = OD Gamma / (2 k_p l) (delta + i g) / [(Gamma/2 - i delta)(g - i delta) + (Omega_c/2)^2].
/// Throws std::domain_error at an exact pole.
std::complex<double> susceptibility(const EitMediumParams& medium, double delta_mhz);

/// Probe intensity transmission exp(-k_p l Im chi(delta)).
double transmission(const EitMediumParams& medium, double delta_mhz);

/// Slow-light delay OD Gamma / Omega_c^2 (microseconds for MHz inputs);
/// this is (k_p l / 2) dRe(chi)/d(delta) at delta = 0 for vanishing dephasing.
double group_delay(const EitMediumParams& medium);

/// Full width at half maximum of the EIT transparency peak, found by
/// bisection on the transmission between the peak and the surrounding
/// absorption minima. Throws std::domain_error when there is no peak.
double eit_window_fwhm(const EitMediumParams& medium);

/// |p_F1 + (1 - p_F1) exp(-2 pi i dF t)|^2.
double hyperfine_beat_factor(double p_f1, double delta_f_khz, double t_us);

/// eta0 exp(-t_T^2 / tau_R^2) times the hyperfine beat factor.
double storage_efficiency(const StorageParams& params, double t_total_us);

/// Difference of the trapezoidal centres of mass, <t>_out - <t>_in.
double centre_of_mass_delay(const PulseWaveform& f_in, const PulseWaveform& f_out);

/// Spectral width of the read photon, sqrt(FWHM_total^2 - FWHM_EIT^2).
double memory_linewidth_deconvolve(double fwhm_total_mhz, double fwhm_eit_mhz);

/// N_out = N_max T (1 - exp(-N_in / N_max)).
double nonlinear_retrieval(double n_in, const SaturationParams& sat);

/// Monte Carlo of the collective Rydberg (or spin-wave) phase grating:
/// samples Maxwell-Boltzmann velocities along dk, advances each atom's
/// phase by dk v t and returns |sum_j exp(i phi_j) / N|^2.
double simulate_collective_dephasing(int n_atoms, double temperature_k, double delta_k_per_m,
                                     double t_s, std::uint64_t seed,
                                     double mass_kg = constants::kRb87Mass);

}  // namespace rydsim::memory

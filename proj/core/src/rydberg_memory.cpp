#include "rydsim/rydberg_memory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rydsim/rng.hpp"

namespace rydsim::memory {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double centre_of_mass(const PulseWaveform& f) {
  f.validate();
  const double m = f.mass();
  if (!(m > 0.0)) throw std::invalid_argument("waveform has zero mass");
  if (f.samples.size() == 1) return f.samples.front().t_us;
  double first = 0.0;
  for (std::size_t i = 1; i < f.samples.size(); ++i) {
    const auto& a = f.samples[i - 1];
    const auto& b = f.samples[i];
    first += 0.5 * (a.intensity * a.t_us + b.intensity * b.t_us) * (b.t_us - a.t_us);
  }
  return first / m;
}

}  // namespace

void EitMediumParams::validate() const {
  require(std::isfinite(od) && od > 0.0, "medium.od must be > 0");
  require(std::isfinite(gamma_mhz) && gamma_mhz > 0.0, "medium.gamma_mhz must be > 0");
  require(std::isfinite(omega_c_mhz) && omega_c_mhz >= 0.0, "medium.omega_c_mhz must be >= 0");
  require(std::isfinite(gamma_gr_mhz) && gamma_gr_mhz >= 0.0, "medium.gamma_gr_mhz must be >= 0");
  require(std::isfinite(k_p_per_m) && k_p_per_m > 0.0, "medium.k_p_per_m must be > 0");
  require(std::isfinite(length_m) && length_m > 0.0, "medium.length_m must be > 0");
}

void StorageParams::validate() const {
  require(std::isfinite(eta0) && eta0 >= 0.0 && eta0 <= 1.0, "storage.eta0 must lie in [0, 1]");
  require(std::isfinite(tau_r_us) && tau_r_us > 0.0, "storage.tau_r_us must be > 0");
  require(std::isfinite(delta_f_khz), "storage.delta_f_khz must be finite");
  require(std::isfinite(p_f1) && p_f1 >= 0.0 && p_f1 <= 1.0, "storage.p_f1 must lie in [0, 1]");
  require(std::isfinite(t_off_us), "storage.t_off_us must be finite");
}

void SaturationParams::validate() const {
  require(std::isfinite(n_max) && n_max > 0.0, "saturation.n_max must be > 0");
  require(std::isfinite(t_lin) && t_lin >= 0.0 && t_lin <= 1.0, "saturation.t_lin must lie in [0, 1]");
}

std::complex<double> susceptibility(const EitMediumParams& medium, double delta_mhz) {
  medium.validate();
  using namespace std::complex_literals;
  const double half_gamma = 0.5 * medium.gamma_mhz;
  const double half_omega = 0.5 * medium.omega_c_mhz;
  const std::complex<double> denom =
      (half_gamma - 1i * delta_mhz) * (medium.gamma_gr_mhz - 1i * delta_mhz) + half_omega * half_omega;
  if (std::abs(denom) < 1e-30) throw std::domain_error("susceptibility pole: unphysical medium parameters");
  const double prefactor = medium.od * medium.gamma_mhz / (2.0 * medium.k_p_per_m * medium.length_m);
  return prefactor * (delta_mhz + 1i * medium.gamma_gr_mhz) / denom;
}

double transmission(const EitMediumParams& medium, double delta_mhz) {
  const auto chi = susceptibility(medium, delta_mhz);
  return std::exp(-medium.k_p_per_m * medium.length_m * chi.imag());
}

double group_delay(const EitMediumParams& medium) {
  medium.validate();
  if (!(medium.omega_c_mhz > 0.0)) throw std::domain_error("group delay diverges for Omega_c = 0");
  return medium.od * medium.gamma_mhz / (medium.omega_c_mhz * medium.omega_c_mhz);
}

double eit_window_fwhm(const EitMediumParams& medium) {
  medium.validate();
  const double peak = transmission(medium, 0.0);
  // The absorption maxima of the Autler-Townes doublet sit near +-Omega_c/2.
  double d_min = 0.0;
  double t_min = peak;
  const double span = medium.omega_c_mhz + medium.gamma_mhz;
  const int n = 4000;
  for (int i = 1; i <= n; ++i) {
    const double d = span * i / n;
    const double t = transmission(medium, d);
    if (t < t_min) {
      t_min = t;
      d_min = d;
    }
  }
  if (!(peak > t_min) || d_min == 0.0) throw std::domain_error("no EIT transparency peak");
  const double half = 0.5 * (peak + t_min);
  double lo = 0.0;
  double hi = d_min;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (transmission(medium, mid) > half ? lo : hi) = mid;
  }
  return lo + hi;  // 2 x half-width
}

double hyperfine_beat_factor(double p_f1, double delta_f_khz, double t_us) {
  const double phase = 2.0 * constants::kPi * delta_f_khz * 1e-3 * t_us;
  const std::complex<double> amp = p_f1 + (1.0 - p_f1) * std::polar(1.0, -phase);
  return std::norm(amp);
}

double storage_efficiency(const StorageParams& params, double t_total_us) {
  params.validate();
  const double x = t_total_us / params.tau_r_us;
  return params.eta0 * std::exp(-x * x) * hyperfine_beat_factor(params.p_f1, params.delta_f_khz, t_total_us);
}

double centre_of_mass_delay(const PulseWaveform& f_in, const PulseWaveform& f_out) {
  return centre_of_mass(f_out) - centre_of_mass(f_in);
}

double memory_linewidth_deconvolve(double fwhm_total_mhz, double fwhm_eit_mhz) {
  if (!(fwhm_eit_mhz > 0.0) || !(fwhm_total_mhz > fwhm_eit_mhz))
    throw std::invalid_argument("linewidth deconvolution needs FWHM_total > FWHM_EIT > 0");
  return std::sqrt(fwhm_total_mhz * fwhm_total_mhz - fwhm_eit_mhz * fwhm_eit_mhz);
}

double nonlinear_retrieval(double n_in, const SaturationParams& sat) {
  sat.validate();
  if (!(n_in >= 0.0)) throw std::invalid_argument("N_in must be >= 0");
  return sat.n_max * sat.t_lin * -std::expm1(-n_in / sat.n_max);
}

double simulate_collective_dephasing(int n_atoms, double temperature_k, double delta_k_per_m,
                                     double t_s, std::uint64_t seed, double mass_kg) {
  if (n_atoms < 2) throw std::invalid_argument("collective dephasing needs at least 2 atoms");
  require(std::isfinite(temperature_k) && temperature_k > 0.0, "temperature must be > 0");
  require(std::isfinite(delta_k_per_m) && delta_k_per_m >= 0.0, "delta_k must be >= 0");
  require(std::isfinite(mass_kg) && mass_kg > 0.0, "mass must be > 0");
  Rng rng(seed);
  const double sigma_v = std::sqrt(constants::kBoltzmann * temperature_k / mass_kg);
  double re = 0.0;
  double im = 0.0;
  for (int j = 0; j < n_atoms; ++j) {
    const double phase = delta_k_per_m * sigma_v * rng.normal() * t_s;
    re += std::cos(phase);
    im += std::sin(phase);
  }
  re /= n_atoms;
  im /= n_atoms;
  return re * re + im * im;
}

}  // namespace rydsim::memory

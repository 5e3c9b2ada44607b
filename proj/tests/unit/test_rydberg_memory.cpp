#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/photon_source.hpp"
#include "rydsim/rydberg_memory.hpp"
#include "rydsim/waveform.hpp"

using namespace rydsim;
using namespace rydsim::memory;

namespace {

EitMediumParams paper_medium() {
  EitMediumParams m;
  m.od = 5.4;
  m.omega_c_mhz = 2.66;
  m.gamma_gr_mhz = 0.29;
  m.gamma_mhz = 6.07;
  return m;
}

}  // namespace

TEST(Susceptibility, TwoLevelResonantLimit) {
  auto m = paper_medium();
  m.omega_c_mhz = 0.0;
  for (double g : {0.29, 1e-3}) {
    m.gamma_gr_mhz = g;
    EXPECT_NEAR(transmission(m, 0.0), std::exp(-5.4), 1e-12);
  }
}

TEST(Susceptibility, PerfectEitHasNoAbsorption) {
  auto m = paper_medium();
  m.gamma_gr_mhz = 0.0;
  EXPECT_EQ(susceptibility(m, 0.0).imag(), 0.0);
  EXPECT_DOUBLE_EQ(transmission(m, 0.0), 1.0);
}

TEST(Susceptibility, FarDetunedTransparent) {
  const auto m = paper_medium();
  // |chi| falls off as 1/delta.
  EXPECT_NEAR(std::abs(susceptibility(m, 1e7)) / std::abs(susceptibility(m, 1e8)), 10.0, 1e-4);
  EXPECT_GT(transmission(m, 1e4), 1.0 - 1e-4);
  EXPECT_GT(transmission(m, 10.0 * m.gamma_mhz), 0.9);
  EXPECT_GT(transmission(m, -10.0 * m.gamma_mhz), 0.9);
}

TEST(Susceptibility, TransmissionSymmetricAndBounded) {
  const auto m = paper_medium();
  for (double d = 0.0; d < 30.0; d += 0.37) {
    const double t = transmission(m, d);
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 1.0);
    EXPECT_NEAR(t, transmission(m, -d), 1e-13);
  }
}

TEST(Susceptibility, InvalidMediumRejected) {
  auto m = paper_medium();
  m.od = -1.0;
  EXPECT_THROW(transmission(m, 0.0), std::invalid_argument);
}

TEST(GroupDelay, ScalingLaws) {
  auto m = paper_medium();
  const double d = group_delay(m);
  m.omega_c_mhz *= 2.0;
  EXPECT_NEAR(group_delay(m), d / 4.0, 1e-12);
  m.od = 1e-9;
  EXPECT_LT(group_delay(m), 1e-8);
  m.omega_c_mhz = 0.0;
  EXPECT_THROW(group_delay(m), std::domain_error);
}

// Slope of the refractive phase k l Re(chi)/2 at resonance, by central
// differences, for a vanishing ground-Rydberg dephasing.
TEST(GroupDelay, MatchesPhaseSlope) {
  auto m = paper_medium();
  m.gamma_gr_mhz = 0.0;
  const double h = 1e-4;
  const double slope = (susceptibility(m, h).real() - susceptibility(m, -h).real()) / (2.0 * h);
  EXPECT_NEAR(0.5 * m.k_p_per_m * m.length_m * slope, group_delay(m), 1e-6 * group_delay(m));
}

TEST(EitWindow, HalfMaximumAtReportedWidth) {
  const auto m = paper_medium();
  const double fwhm = eit_window_fwhm(m);
  const double peak = transmission(m, 0.0);
  // Absorption minimum located independently on a fine grid.
  double t_min = peak;
  for (double d = 0.0; d < 10.0; d += 1e-4) t_min = std::min(t_min, transmission(m, d));
  const double half = 0.5 * (peak + t_min);
  EXPECT_NEAR(transmission(m, 0.5 * fwhm), half, 1e-9);
  EXPECT_GT(transmission(m, 0.45 * fwhm), half);
  EXPECT_LT(transmission(m, 0.55 * fwhm), half);
}

TEST(EitWindow, NoPeakWithoutCoupling) {
  auto m = paper_medium();
  m.omega_c_mhz = 0.0;
  EXPECT_THROW(eit_window_fwhm(m), std::domain_error);
}

TEST(StorageEfficiency, Limits) {
  StorageParams s;
  s.eta0 = 0.05;
  EXPECT_DOUBLE_EQ(storage_efficiency(s, 0.0), 0.05);
  s.tau_r_us = 1e12;
  const double period = 1e3 / s.delta_f_khz;
  EXPECT_NEAR(storage_efficiency(s, period), 0.05, 1e-12);
  s.p_f1 = 0.5;
  EXPECT_NEAR(storage_efficiency(s, 0.5 * period), 0.0, 1e-15);
}

TEST(StorageEfficiency, BeatFactorBounds) {
  for (double p : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    for (double t = 0.0; t < 12.0; t += 0.25) {
      const double b = hyperfine_beat_factor(p, 182.3, t);
      EXPECT_GE(b, std::pow(2.0 * p - 1.0, 2) - 1e-12);
      EXPECT_LE(b, 1.0 + 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(hyperfine_beat_factor(1.0, 182.3, 3.7), 1.0);
}

TEST(CentreOfMass, TranslationAndScale) {
  const auto in = PulseWaveform::gaussian(1.0, 0.35, 0.002, 0.0, 4.0);
  EXPECT_NEAR(centre_of_mass_delay(in, in.shifted(1.0)), 1.0, 1e-12);
  EXPECT_NEAR(centre_of_mass_delay(in, in.scaled(0.5)), 0.0, 1e-12);
  const auto out = PulseWaveform::gaussian(2.47, 0.35, 0.002, 0.0, 4.0);
  EXPECT_NEAR(centre_of_mass_delay(in, out), 1.47, 0.001);
}

TEST(CentreOfMass, ZeroMassRejected) {
  auto in = PulseWaveform::gaussian(1.0, 0.35, 0.01, 0.0, 2.0);
  EXPECT_THROW(centre_of_mass_delay(in, in.scaled(0.0)), std::invalid_argument);
}

TEST(LinewidthDeconvolution, Examples) {
  EXPECT_NEAR(memory_linewidth_deconvolve(2.38, 0.73), 2.265, 5e-4);
  EXPECT_NEAR(memory_linewidth_deconvolve(std::sqrt(2.0), 1.0), 1.0, 1e-12);
  EXPECT_NEAR(memory_linewidth_deconvolve(1.7, 1e-9), 1.7, 1e-12);
  EXPECT_THROW(memory_linewidth_deconvolve(0.5, 0.73), std::invalid_argument);
  EXPECT_THROW(memory_linewidth_deconvolve(1.0, 0.0), std::invalid_argument);
}

TEST(Saturation, LimitsAndSlope) {
  SaturationParams s;
  EXPECT_DOUBLE_EQ(nonlinear_retrieval(0.0, s), 0.0);
  EXPECT_NEAR(nonlinear_retrieval(1e-6, s) / 1e-6, s.t_lin, 1e-9);
  EXPECT_NEAR(nonlinear_retrieval(1e6, s), s.n_max * s.t_lin, 1e-12);
  EXPECT_THROW(nonlinear_retrieval(-1.0, s), std::invalid_argument);
  for (double n = 1.0; n < 500.0; n *= 1.7)
    EXPECT_LT(nonlinear_retrieval(n * 1.7, s), 1.7 * nonlinear_retrieval(n, s));  // concave
}

TEST(CollectiveDephasing, TrivialLimits) {
  const double dk = constants::wavenumber(constants::kWavelengthD2) * std::sin(3.4 * constants::kPi / 180.0);
  EXPECT_DOUBLE_EQ(simulate_collective_dephasing(1000, 77e-6, dk, 0.0, 1), 1.0);
  EXPECT_NEAR(simulate_collective_dephasing(1000, 77e-6, 0.0, 1e-5, 1), 1.0, 1e-12);
  EXPECT_THROW(simulate_collective_dephasing(1, 77e-6, dk, 0.0, 1), std::invalid_argument);
}

TEST(CollectiveDephasing, OneOverETime) {
  const double dk = constants::wavenumber(constants::kWavelengthD2) * std::sin(3.4 * constants::kPi / 180.0);
  const double tau = source::motional_coherence_time(constants::kRb87Mass, 77e-6, dk);
  const int n = 10000;
  EXPECT_NEAR(simulate_collective_dephasing(n, 77e-6, dk, tau, 11), std::exp(-1.0), 5.0 / std::sqrt(n));
}

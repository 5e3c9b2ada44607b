#pragma once

#include <numbers>

// Physical constants used by the coherence-time and EIT models.
// Values are CODATA 2018 unless noted.
namespace rydsim::constants {

inline constexpr double kPi = std::numbers::pi;

/// Boltzmann constant, J/K (exact in the 2019 SI).
inline constexpr double kBoltzmann = 1.380649e-23;

/// Atomic mass constant, kg.
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;

/// Rb-87 atomic mass, 86.909180527 u.
inline constexpr double kRb87Mass = 86.909180527 * kAtomicMassUnit;

/// Rb D2 line (5S1/2 -> 5P3/2) vacuum wavelength, m.
inline constexpr double kWavelengthD2 = 780.241209686e-9;

/// Nominal 5P3/2 -> nS Rydberg coupling wavelength, m.
inline constexpr double kWavelengthRydbergCoupling = 480.0e-9;

/// Rb D2 natural linewidth Gamma/2pi, MHz (rounded, overridable in config).
inline constexpr double kGammaD2MHz = 6.07;

inline constexpr double wavenumber(double wavelength_m) { return 2.0 * kPi / wavelength_m; }

}  // namespace rydsim::constants

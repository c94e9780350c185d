#pragma once

namespace omckit::constants {

// CODATA 2018 exact values (SI).
inline constexpr double planck_j_s = 6.62607015e-34;
inline constexpr double boltzmann_j_per_k = 1.380649e-23;
inline constexpr double speed_of_light_m_per_s = 299792458.0;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar_j_s = planck_j_s / (2.0 * pi);

// h*f/k_B for f in Hz, i.e. the temperature equivalent of one quantum.
inline constexpr double quantum_temperature_k(double f_hz) {
  return planck_j_s * f_hz / boltzmann_j_per_k;
}

}  // namespace omckit::constants

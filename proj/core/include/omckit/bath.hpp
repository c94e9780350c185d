#pragma once

namespace omckit {

/// Two high-frequency modes at omega_1 > omega_2 coupled to the mechanical
/// mode at omega_m = omega_1 - omega_2 through the lowest-order anharmonic
/// term, both thermalized at T_p.
struct ToyThreePhonon {
  double omega_1_hz = 0.0;
  double omega_2_hz = 0.0;
  double omega_m_hz = 0.0;
  double coupling_hz = 0.0;  // anharmonic matrix-element constant A
  double t_p_k = 0.0;

  void validate() const;  // omega_1 > omega_2 > 0, difference = omega_m to 1 ppm
};

struct ScatteringRates {
  double gamma_plus_hz = 0.0;   // into the mechanical mode
  double gamma_minus_hz = 0.0;  // out of the mechanical mode
};

/// Raw first-order rates for given occupancies:
/// Gamma+ = A (n_m+1)(n_2+1) n_1,  Gamma- = A (n_1+1) n_m n_2.
ScatteringRates scattering_rates(double coupling_hz, double n_1, double n_2,
                                 double n_m);

/// Rates with n_1, n_2 thermal at the model's T_p.
ScatteringRates toy_rates(const ToyThreePhonon& model, double n_m);

struct EffectiveBath {
  double n_p = 0.0;
  double gamma_p_hz = 0.0;
};

/// The rate equation dn_m/dt = Gamma+ - Gamma- is linear in n_m; its fixed
/// point and decay rate define an effective thermal bath:
///   n_p = n_1 (n_2 + 1) / (n_2 - n_1),  gamma_p = A (n_2 - n_1).
/// The numerator pairs the higher-frequency mode's occupancy n_1 with
/// (n_2 + 1); swapping the labels yields n_p + 1 instead of n_p. With both
/// modes thermal, n_p equals the Bose-Einstein occupancy at omega_m exactly.
EffectiveBath toy_effective_bath(const ToyThreePhonon& model);

/// Continuum of absorption-populated modes above a cutoff, with density of
/// states times matrix element ~ omega^a.
struct ContinuumBath {
  double exponent_a = 0.0;   // must be > 1
  double omega_c_hz = 0.0;   // cutoff (ordinary frequency)
  double prefactor_hz = 0.0; // gamma normalization, absorbs K^-(a+1)

  void validate() const;
  double cutoff_temperature_k() const;  // h f_c / k_B
};

/// I(a, x_c) = integral_{x_c}^inf x^a e^x (e^x - 1)^-2 dx, relative error
/// < 1e-8. Adaptive Gauss-Kronrod body (regularized near 0), incomplete-
/// gamma series tail beyond x = 50. I(a, 0) = a Gamma(a) zeta(a).
double boson_mixing_integral(double a, double x_c);

/// prefactor * omega_m * T_p^(a+1) * I(a, x_c) with x_c = T_c / T_p.
double gamma_p_integral(const ContinuumBath& bath, double omega_m_hz,
                        double t_p_k);

/// Activated asymptote prefactor * omega_m * T_p^(a+1) * x_c^a e^{-x_c},
/// i.e. ~ T_p exp(-T_c/T_p). Valid for x_c >> 1.
double gamma_p_low_t(const ContinuumBath& bath, double omega_m_hz,
                     double t_p_k);

/// High-temperature power law prefactor * omega_m * T_p^(a+1) * a Gamma(a)
/// zeta(a). Valid for x_c << 1, requires a > 1.
double gamma_p_high_t(const ContinuumBath& bath, double omega_m_hz,
                      double t_p_k);

/// Optional integrand variant: rho*A = prefactor * omega_m (omega_m + omega)
/// omega^3 instead of the pure power law; integrates the occupancy
/// difference n(omega) - n(omega + omega_m) above the cutoff directly.
double gamma_p_continuum_elastic(const ContinuumBath& bath, double omega_m_hz,
                                 double t_p_k);

}  // namespace omckit

#include "omckit/bath.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "omckit/constants.hpp"
#include "omckit/errors.hpp"
#include "omckit/physics.hpp"
#include "omckit/quadrature.hpp"
#include "omckit/special.hpp"

namespace omckit {

namespace {

// x^a e^x / (e^x - 1)^2 written as x^a / (2 sinh(x/2))^2; safe up to x ~ 1400.
double mixing_integrand(double a, double x) {
  const double s = 2.0 * std::sinh(0.5 * x);
  return std::pow(x, a) / (s * s);
}

// g(x) = x^2 e^x / (e^x - 1)^2, smooth with g(0) = 1.
double mixing_core(double x) {
  if (x < 1e-8) return 1.0 - x * x / 12.0;
  const double s = 2.0 * std::sinh(0.5 * x);
  return x * x / (s * s);
}

// Exponential-tail series: integral_X^inf = sum_k k^-a Gamma(a+1, k X).
double mixing_tail(double a, double x_lo) {
  double total = 0.0;
  for (int k = 1; k <= 8; ++k) {
    const double z = k * x_lo;
    if (z > 700.0) break;  // underflows
    const double term = std::pow(k, -a) * upper_incomplete_gamma(a + 1.0, z);
    total += term;
    if (term < 1e-16 * total) break;
  }
  return total;
}

}  // namespace

void ToyThreePhonon::validate() const {
  if (!(omega_2_hz > 0.0) || !(omega_1_hz > omega_2_hz))
    throw DomainError("ToyThreePhonon: need omega_1 > omega_2 > 0");
  const double diff = omega_1_hz - omega_2_hz;
  if (std::fabs(diff - omega_m_hz) > 1e-6 * omega_m_hz)
    throw DomainError(
        "ToyThreePhonon: omega_1 - omega_2 must equal omega_m within 1 ppm");
  if (!(coupling_hz > 0.0))
    throw DomainError("ToyThreePhonon: coupling must be > 0");
  if (!(t_p_k >= 0.0))
    throw DomainError("ToyThreePhonon: T_p must be >= 0");
}

ScatteringRates scattering_rates(double coupling_hz, double n_1, double n_2,
                                 double n_m) {
  if (n_1 < 0.0 || n_2 < 0.0 || n_m < 0.0)
    throw DomainError("scattering_rates: occupancies must be >= 0");
  return {coupling_hz * (n_m + 1.0) * (n_2 + 1.0) * n_1,
          coupling_hz * (n_1 + 1.0) * n_m * n_2};
}

ScatteringRates toy_rates(const ToyThreePhonon& model, double n_m) {
  model.validate();
  const double n_1 =
      model.t_p_k > 0.0 ? bose_einstein(model.omega_1_hz, model.t_p_k) : 0.0;
  const double n_2 =
      model.t_p_k > 0.0 ? bose_einstein(model.omega_2_hz, model.t_p_k) : 0.0;
  return scattering_rates(model.coupling_hz, n_1, n_2, n_m);
}

EffectiveBath toy_effective_bath(const ToyThreePhonon& model) {
  model.validate();
  const double n_1 =
      model.t_p_k > 0.0 ? bose_einstein(model.omega_1_hz, model.t_p_k) : 0.0;
  const double n_2 =
      model.t_p_k > 0.0 ? bose_einstein(model.omega_2_hz, model.t_p_k) : 0.0;
  const double diff = n_2 - n_1;
  if (diff == 0.0)
    throw DomainError(
        "toy_effective_bath: degenerate occupancies (n_2 == n_1)");
  return {n_1 * (n_2 + 1.0) / diff, model.coupling_hz * diff};
}

void ContinuumBath::validate() const {
  if (!(exponent_a > 1.0))
    throw DomainError("ContinuumBath: exponent must be > 1 (got " +
                      std::to_string(exponent_a) + ")");
  if (!(omega_c_hz > 0.0))
    throw DomainError("ContinuumBath: cutoff frequency must be > 0");
}

double ContinuumBath::cutoff_temperature_k() const {
  return constants::quantum_temperature_k(omega_c_hz);
}

double boson_mixing_integral(double a, double x_c) {
  if (!(a > 1.0))
    throw DomainError("boson_mixing_integral: exponent must be > 1");
  if (x_c < 0.0)
    throw DomainError("boson_mixing_integral: x_c must be >= 0");

  constexpr double kTailStart = 50.0;
  if (x_c >= kTailStart) return mixing_tail(a, x_c);

  QuadratureOptions opts;
  opts.rel_tol = 1e-11;

  double total = mixing_tail(a, kTailStart);
  const double body_lo = std::max(x_c, 1.0);
  total += integrate([a](double x) { return mixing_integrand(a, x); }, body_lo,
                     kTailStart, opts);

  if (x_c < 1.0) {
    // Near zero the integrand is x^(a-2) g(x); substitute u = x^(a-1) so the
    // transformed integrand g(u^(1/(a-1))) / (a-1) is bounded and smooth.
    const double p = a - 1.0;
    const double u_lo = x_c > 0.0 ? std::pow(x_c, p) : 0.0;
    total += integrate(
                 [p](double u) {
                   return mixing_core(u > 0.0 ? std::pow(u, 1.0 / p) : 0.0);
                 },
                 u_lo, 1.0, opts) /
             p;
  }
  return total;
}

double gamma_p_integral(const ContinuumBath& bath, double omega_m_hz,
                        double t_p_k) {
  bath.validate();
  if (!(t_p_k > 0.0))
    throw DomainError("gamma_p_integral: T_p must be > 0");
  const double x_c = bath.cutoff_temperature_k() / t_p_k;
  return bath.prefactor_hz * omega_m_hz *
         std::pow(t_p_k, bath.exponent_a + 1.0) *
         boson_mixing_integral(bath.exponent_a, x_c);
}

double gamma_p_low_t(const ContinuumBath& bath, double omega_m_hz,
                     double t_p_k) {
  bath.validate();
  if (!(t_p_k > 0.0)) return 0.0;
  const double x_c = bath.cutoff_temperature_k() / t_p_k;
  if (x_c > 700.0) return 0.0;  // exp underflow regime
  return bath.prefactor_hz * omega_m_hz *
         std::pow(t_p_k, bath.exponent_a + 1.0) *
         std::pow(x_c, bath.exponent_a) * std::exp(-x_c);
}

double gamma_p_high_t(const ContinuumBath& bath, double omega_m_hz,
                      double t_p_k) {
  bath.validate();
  const double a = bath.exponent_a;
  return bath.prefactor_hz * omega_m_hz * std::pow(t_p_k, a + 1.0) * a *
         std::tgamma(a) * riemann_zeta(a);
}

double gamma_p_continuum_elastic(const ContinuumBath& bath, double omega_m_hz,
                                 double t_p_k) {
  bath.validate();
  if (!(t_p_k > 0.0))
    throw DomainError("gamma_p_continuum_elastic: T_p must be > 0");
  // Integrate in x = h f / k T; occupancy difference decays like e^-x, so a
  // fixed window plus tail margin of ~60 suffices at double precision.
  const double kt_hz = t_p_k / constants::quantum_temperature_k(1.0);
  const double x_m = omega_m_hz / kt_hz;
  const double x_c = bath.omega_c_hz / kt_hz;
  const auto integrand = [&](double x) {
    const double f = x * kt_hz;
    const double occ_diff = 1.0 / std::expm1(x) - 1.0 / std::expm1(x + x_m);
    return omega_m_hz * (omega_m_hz + f) * f * f * f * occ_diff * kt_hz;
  };
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  return bath.prefactor_hz * integrate(integrand, x_c, x_c + 80.0, opts);
}

}  // namespace omckit

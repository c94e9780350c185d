#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "omckit/interp.hpp"

namespace omckit {

// All rates and frequencies are ordinary frequencies in Hz (the "/2pi"
// values); angular conversion happens inside the formulas that need it.

struct DeviceParams {
  double g0_hz = 0.0;        // vacuum optomechanical coupling
  double kappa_hz = 0.0;     // total optical decay rate
  double kappa_e_hz = 0.0;   // extrinsic (waveguide) coupling
  double kappa_i_hz = 0.0;   // intrinsic optical loss
  double omega_m_hz = 0.0;   // mechanical resonance
  double lambda_c_m = 0.0;   // optical resonance wavelength

  // Throws DomainError unless all fields are positive and
  // kappa = kappa_e + kappa_i within 1 part in 1e6.
  void validate() const;

  bool sideband_resolved() const { return omega_m_hz > kappa_hz; }
  double optical_frequency_hz() const;
};

struct ProbeState {
  double detuning_hz = 0.0;  // cavity minus laser: +omega_m cools
  double n_c = 0.0;          // intracavity photon number

  void validate() const;  // n_c >= 0
};

/// gamma_p as a function of the absorption-bath temperature T_p.
/// Two backends: activated form A*T_p*exp(-T_c/T_p), or a log-log
/// shape-preserving spline through tabulated (T_p, gamma_p) points.
class GammaPLaw {
 public:
  GammaPLaw();  // identically zero
  static GammaPLaw activated(double amplitude_hz_per_k, double t_c_k);
  static GammaPLaw tabulated(const std::vector<double>& t_p_k,
                             const std::vector<double>& gamma_p_hz);

  double operator()(double t_p_k) const;

 private:
  enum class Kind { Zero, Activated, Tabulated };
  Kind kind_;
  double amplitude_hz_per_k_ = 0.0;
  double t_c_k_ = 0.0;
  LogLogPchip table_;
};

/// Gaussian jitter FWHM as a power law in T_p.
struct JitterLaw {
  double amplitude_hz = 0.0;  // gamma_G at T_p = 1 K
  double exponent = 0.0;

  double operator()(double t_p_k) const;
};

struct BathModel {
  double gamma_0_hz = 0.0;   // coupling to the fridge bath
  double t_f_k = 0.0;        // fridge temperature
  double np_amplitude = 0.0; // absorption-bath occupancy at n_c = 1
  double np_exponent = 0.25;
  GammaPLaw gamma_p_law;
  std::optional<JitterLaw> jitter_law;

  void validate() const;

  // Absorption-bath occupancy extrapolated over the full n_c range.
  double n_p(double n_c) const;
};

// --- closed-form physics -------------------------------------------------

/// Thermal occupancy 1/(exp(h f / k T) - 1); 0 at T = 0. expm1-based, so it
/// stays accurate when h f / k T is tiny.
double bose_einstein(double f_hz, double t_k);

/// T such that bose_einstein(f, T) = n, i.e. h f / (k ln(1 + 1/n)).
double inverse_bose_einstein(double f_hz, double n);

/// Optomechanical damping rate at arbitrary detuning via the two-Lorentzian
/// sideband filter; reduces to 4 g0^2 n_c / kappa at delta = +omega_m in the
/// sideband-resolved limit. Odd in delta, negative on the blue side.
double gamma_om(const DeviceParams& dev, const ProbeState& probe);

/// Detuning-independent shorthand 4 g0^2 n_c / kappa.
double gamma_om_resolved(const DeviceParams& dev, double n_c);

struct OccupancyDetail {
  double occupancy = 0.0;
  double n_f = 0.0;
  double n_p = 0.0;
  double t_p_k = 0.0;
  double gamma_p_hz = 0.0;
  double gamma_om_hz = 0.0;
  double gamma_total_hz = 0.0;  // gamma_0 + gamma_p + gamma_om
};

/// Steady-state mode occupancy (gamma_0 n_f + gamma_p n_p) / gamma_total.
/// Throws InstabilityError when gamma_total <= 0.
double mode_occupancy(const DeviceParams& dev, const ProbeState& probe,
                      const BathModel& bath);
OccupancyDetail mode_occupancy_detail(const DeviceParams& dev,
                                      const ProbeState& probe,
                                      const BathModel& bath);

/// xi = (<n>_blue + 1)/<n>_red - 1 with both occupancies evaluated at the
/// same n_c and bath, detuning +/- omega_m. Equal transduction gain at the
/// two sidebands is assumed.
double sideband_asymmetry(const DeviceParams& dev, double n_c,
                          const BathModel& bath);

/// C = gamma_om(delta = omega_m) / gamma_i.
double cooperativity(const DeviceParams& dev, double n_c, double gamma_i_hz);

/// Photon number where blue-detuned anti-damping cancels gamma_i:
/// n_thr = gamma_i kappa / (4 g0^2).
double self_oscillation_threshold(const DeviceParams& dev, double gamma_i_hz);

/// |1 - kappa_e / (i delta + kappa/2)|^2, the single-port reflection dip.
double cavity_reflection(const DeviceParams& dev, double delta_hz);

/// n_c for input power P at detuning delta:
/// P * 2 pi kappa_e / (h f_o ((2 pi kappa / 2)^2 + (2 pi delta)^2)).
double intracavity_photons(const DeviceParams& dev, double delta_hz,
                           double input_power_w);

/// Inverse of intracavity_photons in the power argument.
double input_power_for_photons(const DeviceParams& dev, double delta_hz,
                               double n_c);

}  // namespace omckit

#include "omckit/physics.hpp"

#include <cmath>
#include <string>

#include "omckit/constants.hpp"
#include "omckit/errors.hpp"

namespace omckit {

namespace {
constexpr double kTwoPi = 2.0 * constants::pi;
}

void DeviceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw DomainError(std::string("DeviceParams: ") + name +
                        " must be positive");
  };
  positive(g0_hz, "g0_hz");
  positive(kappa_hz, "kappa_hz");
  positive(kappa_e_hz, "kappa_e_hz");
  positive(kappa_i_hz, "kappa_i_hz");
  positive(omega_m_hz, "omega_m_hz");
  positive(lambda_c_m, "lambda_c_m");
  const double mismatch =
      std::fabs(kappa_hz - (kappa_e_hz + kappa_i_hz)) / kappa_hz;
  if (mismatch > 1e-6)
    throw DomainError(
        "DeviceParams: kappa must equal kappa_e + kappa_i (mismatch " +
        std::to_string(mismatch) + ")");
}

double DeviceParams::optical_frequency_hz() const {
  return constants::speed_of_light_m_per_s / lambda_c_m;
}

void ProbeState::validate() const {
  if (!(n_c >= 0.0)) throw DomainError("ProbeState: n_c must be >= 0");
}

GammaPLaw::GammaPLaw() : kind_(Kind::Zero) {}

GammaPLaw GammaPLaw::activated(double amplitude_hz_per_k, double t_c_k) {
  if (!(amplitude_hz_per_k >= 0.0) || !(t_c_k >= 0.0))
    throw DomainError("GammaPLaw::activated: negative parameter");
  GammaPLaw law;
  law.kind_ = Kind::Activated;
  law.amplitude_hz_per_k_ = amplitude_hz_per_k;
  law.t_c_k_ = t_c_k;
  return law;
}

GammaPLaw GammaPLaw::tabulated(const std::vector<double>& t_p_k,
                               const std::vector<double>& gamma_p_hz) {
  GammaPLaw law;
  law.kind_ = Kind::Tabulated;
  law.table_ = LogLogPchip(t_p_k, gamma_p_hz);
  return law;
}

double GammaPLaw::operator()(double t_p_k) const {
  if (t_p_k < 0.0)
    throw DomainError("GammaPLaw: T_p must be >= 0");
  if (t_p_k == 0.0) return 0.0;
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Activated:
      return amplitude_hz_per_k_ * t_p_k * std::exp(-t_c_k_ / t_p_k);
    case Kind::Tabulated:
      return table_(t_p_k);
  }
  return 0.0;
}

double JitterLaw::operator()(double t_p_k) const {
  if (!(t_p_k > 0.0)) return 0.0;
  return amplitude_hz * std::pow(t_p_k, exponent);
}

void BathModel::validate() const {
  if (!(gamma_0_hz >= 0.0)) throw DomainError("BathModel: gamma_0 must be >= 0");
  if (!(t_f_k >= 0.0)) throw DomainError("BathModel: T_f must be >= 0");
  if (!(np_amplitude > 0.0))
    throw DomainError("BathModel: np_amplitude must be > 0");
}

double BathModel::n_p(double n_c) const {
  if (n_c < 0.0) throw DomainError("BathModel::n_p: n_c must be >= 0");
  if (n_c == 0.0) return np_exponent > 0.0 ? 0.0 : np_amplitude;
  return np_amplitude * std::pow(n_c, np_exponent);
}

double bose_einstein(double f_hz, double t_k) {
  if (!(f_hz > 0.0))
    throw DomainError("bose_einstein: frequency must be > 0");
  if (t_k < 0.0) throw DomainError("bose_einstein: temperature must be >= 0");
  if (t_k == 0.0) return 0.0;
  const double x = constants::quantum_temperature_k(f_hz) / t_k;
  return 1.0 / std::expm1(x);
}

double inverse_bose_einstein(double f_hz, double n) {
  if (!(f_hz > 0.0))
    throw DomainError("inverse_bose_einstein: frequency must be > 0");
  if (!(n > 0.0))
    throw DomainError("inverse_bose_einstein: occupancy must be > 0");
  return constants::quantum_temperature_k(f_hz) / std::log1p(1.0 / n);
}

double gamma_om(const DeviceParams& dev, const ProbeState& probe) {
  const double half_kappa_sq = 0.25 * dev.kappa_hz * dev.kappa_hz;
  const double dm = probe.detuning_hz - dev.omega_m_hz;
  const double dp = probe.detuning_hz + dev.omega_m_hz;
  const double filter =
      1.0 / (dm * dm + half_kappa_sq) - 1.0 / (dp * dp + half_kappa_sq);
  return dev.g0_hz * dev.g0_hz * probe.n_c * dev.kappa_hz * filter;
}

double gamma_om_resolved(const DeviceParams& dev, double n_c) {
  return 4.0 * dev.g0_hz * dev.g0_hz * n_c / dev.kappa_hz;
}

OccupancyDetail mode_occupancy_detail(const DeviceParams& dev,
                                      const ProbeState& probe,
                                      const BathModel& bath) {
  probe.validate();
  OccupancyDetail d;
  d.n_f = bath.t_f_k > 0.0 ? bose_einstein(dev.omega_m_hz, bath.t_f_k) : 0.0;
  d.n_p = bath.n_p(probe.n_c);
  d.t_p_k = d.n_p > 0.0 ? inverse_bose_einstein(dev.omega_m_hz, d.n_p) : 0.0;
  d.gamma_p_hz = bath.gamma_p_law(d.t_p_k);
  d.gamma_om_hz = gamma_om(dev, probe);
  d.gamma_total_hz = bath.gamma_0_hz + d.gamma_p_hz + d.gamma_om_hz;
  if (!(d.gamma_total_hz > 0.0))
    throw InstabilityError(
        "mode_occupancy: total damping <= 0 (self-oscillation), gamma_total = " +
        std::to_string(d.gamma_total_hz) + " Hz");
  d.occupancy =
      (bath.gamma_0_hz * d.n_f + d.gamma_p_hz * d.n_p) / d.gamma_total_hz;
  return d;
}

double mode_occupancy(const DeviceParams& dev, const ProbeState& probe,
                      const BathModel& bath) {
  return mode_occupancy_detail(dev, probe, bath).occupancy;
}

double sideband_asymmetry(const DeviceParams& dev, double n_c,
                          const BathModel& bath) {
  const double red =
      mode_occupancy(dev, {dev.omega_m_hz, n_c}, bath);
  const double blue =
      mode_occupancy(dev, {-dev.omega_m_hz, n_c}, bath);
  return (blue + 1.0) / red - 1.0;
}

double cooperativity(const DeviceParams& dev, double n_c, double gamma_i_hz) {
  if (!(gamma_i_hz > 0.0))
    throw DomainError("cooperativity: gamma_i must be > 0");
  return gamma_om(dev, {dev.omega_m_hz, n_c}) / gamma_i_hz;
}

double self_oscillation_threshold(const DeviceParams& dev, double gamma_i_hz) {
  if (!(gamma_i_hz >= 0.0))
    throw DomainError("self_oscillation_threshold: gamma_i must be >= 0");
  return gamma_i_hz * dev.kappa_hz / (4.0 * dev.g0_hz * dev.g0_hz);
}

double cavity_reflection(const DeviceParams& dev, double delta_hz) {
  const std::complex<double> denom(0.5 * dev.kappa_hz, delta_hz);
  const std::complex<double> r = 1.0 - dev.kappa_e_hz / denom;
  return std::norm(r);
}

double intracavity_photons(const DeviceParams& dev, double delta_hz,
                           double input_power_w) {
  if (input_power_w < 0.0)
    throw DomainError("intracavity_photons: input power must be >= 0");
  const double kappa_e = kTwoPi * dev.kappa_e_hz;
  const double half_kappa = 0.5 * kTwoPi * dev.kappa_hz;
  const double delta = kTwoPi * delta_hz;
  const double photon_energy =
      constants::planck_j_s * dev.optical_frequency_hz();
  return input_power_w * kappa_e /
         (photon_energy * (half_kappa * half_kappa + delta * delta));
}

double input_power_for_photons(const DeviceParams& dev, double delta_hz,
                               double n_c) {
  if (n_c < 0.0)
    throw DomainError("input_power_for_photons: n_c must be >= 0");
  const double unit = intracavity_photons(dev, delta_hz, 1.0);
  return n_c / unit;
}

}  // namespace omckit

#include "omckit/calibration.hpp"

#include <cmath>
#include <string>

#include "omckit/constants.hpp"
#include "omckit/errors.hpp"
#include "omckit/lineshape.hpp"

namespace omckit {

void CalibrationChain::validate() const {
  auto in_unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw DomainError(std::string("CalibrationChain: ") + name +
                        " must lie in [0, 1]");
  };
  in_unit(eta_12, "eta_12");
  in_unit(eta_23, "eta_23");
  in_unit(eta_cpl, "eta_cpl");
  in_unit(eta_vc, "eta_vc");
  in_unit(eta_det, "eta_det");
  if (!(detector_gain_v_per_w > 0.0) || !(load_impedance_ohm > 0.0))
    throw DomainError("CalibrationChain: gain and impedance must be > 0");
  if (!(lo_power_w > 0.0))
    throw DomainError("CalibrationChain: LO power must be > 0");
  if (dark_psd_w_per_hz < 0.0)
    throw DomainError("CalibrationChain: dark PSD must be >= 0");
  if (!(beta > 0.0)) throw DomainError("CalibrationChain: beta must be > 0");
}

double total_efficiency(const CalibrationChain& calib) {
  calib.validate();
  return calib.eta_cpl * calib.eta_23 * calib.eta_vc * calib.eta_det;
}

double fiber_coupling_efficiency(double p_pm_w, double p_in_w, double eta_12,
                                 double eta_23) {
  if (!(p_in_w > 0.0))
    throw DomainError("fiber_coupling_efficiency: P_in must be > 0");
  if (p_pm_w < 0.0)
    throw DomainError("fiber_coupling_efficiency: P_PM must be >= 0");
  if (!(eta_12 > 0.0 && eta_12 <= 1.0) || !(eta_23 > 0.0 && eta_23 <= 1.0))
    throw DomainError("fiber_coupling_efficiency: efficiencies must be in (0,1]");
  const double radicand = p_pm_w / (eta_23 * eta_12 * p_in_w);
  if (radicand > 1.0 + 1e-12)
    throw DomainError(
        "fiber_coupling_efficiency: implied efficiency exceeds 1 (radicand " +
        std::to_string(radicand) + ")");
  return std::sqrt(std::min(radicand, 1.0));
}

double shot_noise_floor_w_per_hz(const CalibrationChain& calib,
                                 double f_o_hz) {
  const double s_sn_sq =
      2.0 * constants::planck_j_s * f_o_hz * calib.lo_power_w;
  return calib.detector_gain_v_per_w * calib.detector_gain_v_per_w /
         calib.load_impedance_ohm * s_sn_sq;
}

double receiver_efficiency(const Spectrum& s_ii, double s_noise_w_per_hz,
                           double s_dark_w_per_hz, double p_cal_w,
                           double f_o_hz) {
  s_ii.validate();
  if (s_ii.unit != PsdUnit::WattsPerHz)
    throw ValidationError("receiver_efficiency: spectrum must be in W/Hz");
  if (!(p_cal_w > 0.0))
    throw DomainError("receiver_efficiency: P_cal must be > 0");
  const double floor_diff = s_noise_w_per_hz - s_dark_w_per_hz;
  if (!(floor_diff > 1e-12 * s_noise_w_per_hz))
    throw DomainError(
        "receiver_efficiency: S_noise - S_dark below numerical floor");
  const double df = s_ii.f_step();
  double integral = 0.0;
  for (std::size_t i = 0; i < s_ii.size(); ++i) {
    const double w = (i == 0 || i + 1 == s_ii.size()) ? 0.5 : 1.0;
    integral += w * (s_ii.psd[i] - s_noise_w_per_hz);
  }
  integral *= df / floor_diff;
  return constants::planck_j_s * f_o_hz / p_cal_w * integral;
}

Transduction transduction(const DeviceParams& dev, double delta_hz) {
  const double half_kappa_sq = 0.25 * dev.kappa_hz * dev.kappa_hz;
  Transduction t;
  if (delta_hz < 0.0) {
    const double d = delta_hz + dev.omega_m_hz;
    t.envelope = half_kappa_sq / (d * d + half_kappa_sq);
    t.vacuum_offset = 1;
  } else {
    const double d = delta_hz - dev.omega_m_hz;
    t.envelope = half_kappa_sq / (d * d + half_kappa_sq);
    t.vacuum_offset = 0;
  }
  return t;
}

Spectrum heterodyne_psd(const DeviceParams& dev, const ProbeState& probe,
                        const BathModel& bath, const CalibrationChain& calib,
                        const HeterodyneGrid& grid) {
  dev.validate();
  const OccupancyDetail occ = mode_occupancy_detail(dev, probe, bath);
  const Transduction t = transduction(dev, probe.detuning_hz);

  LineshapeParams line;
  line.center_hz = grid.beat_hz;
  line.gamma_l_hz = occ.gamma_total_hz;
  line.gamma_g_hz =
      bath.jitter_law ? (*bath.jitter_law)(occ.t_p_k) : 0.0;
  line.area = total_efficiency(calib) * calib.beta * t.envelope *
              (occ.occupancy + t.vacuum_offset);
  line.floor = 1.0;  // shot noise in quanta units

  double span = grid.span_hz;
  if (span <= 0.0)
    span = 50.0 * voigt_fwhm(line.gamma_l_hz, line.gamma_g_hz);
  const double step = span / static_cast<double>(grid.points - 1);
  Spectrum s =
      make_spectrum_grid(grid.beat_hz - 0.5 * span, step, grid.points);
  s.unit = PsdUnit::QuantaPerHz;
  s.meta.detuning_hz = probe.detuning_hz;
  s.meta.n_c = probe.n_c;
  s.meta.t_f_k = bath.t_f_k;
  const bool has_peak = line.area > 0.0 && line.gamma_l_hz + line.gamma_g_hz > 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    s.psd[i] = has_peak ? voigt_psd(line, s.frequency_hz[i]) : line.floor;
  return s;
}

double calibrate_occupancy(double area_quanta, const CalibrationChain& calib,
                           const DeviceParams& dev, const ProbeState& probe) {
  if (area_quanta < 0.0)
    throw DomainError("calibrate_occupancy: detected area must be >= 0");
  const Transduction t = transduction(dev, probe.detuning_hz);
  const double gain = total_efficiency(calib) * calib.beta * t.envelope;
  if (!(gain > 0.0))
    throw DomainError("calibrate_occupancy: zero transduction gain");
  const double occ = area_quanta / gain - t.vacuum_offset;
  if (occ < -1e-6)
    throw DomainError(
        "calibrate_occupancy: blue-detuned area implies occupancy " +
        std::to_string(occ));
  return std::max(occ, 0.0);
}

double detected_area(double occupancy, const CalibrationChain& calib,
                     const DeviceParams& dev, const ProbeState& probe) {
  if (occupancy < 0.0)
    throw DomainError("detected_area: occupancy must be >= 0");
  const Transduction t = transduction(dev, probe.detuning_hz);
  return total_efficiency(calib) * calib.beta * t.envelope *
         (occupancy + t.vacuum_offset);
}

Spectrum to_detector_units(const Spectrum& spec, const CalibrationChain& calib,
                           double f_o_hz) {
  if (spec.unit != PsdUnit::QuantaPerHz)
    throw ValidationError("to_detector_units: expected quanta-unit spectrum");
  const double floor = shot_noise_floor_w_per_hz(calib, f_o_hz);
  Spectrum out = spec;
  out.unit = PsdUnit::WattsPerHz;
  for (double& v : out.psd) v = calib.dark_psd_w_per_hz + floor * v;
  return out;
}

Spectrum to_quanta_units(const Spectrum& spec, const CalibrationChain& calib,
                         double f_o_hz) {
  if (spec.unit != PsdUnit::WattsPerHz)
    throw ValidationError("to_quanta_units: expected detector-unit spectrum");
  const double floor = shot_noise_floor_w_per_hz(calib, f_o_hz);
  Spectrum out = spec;
  out.unit = PsdUnit::QuantaPerHz;
  for (double& v : out.psd) v = (v - calib.dark_psd_w_per_hz) / floor;
  return out;
}

Spectrum to_displacement_units(const Spectrum& spec,
                               const CalibrationChain& calib,
                               const DeviceParams& dev,
                               const ProbeState& probe) {
  if (spec.unit != PsdUnit::QuantaPerHz)
    throw ValidationError(
        "to_displacement_units: expected quanta-unit spectrum");
  const Transduction t = transduction(dev, probe.detuning_hz);
  const double gain = total_efficiency(calib) * calib.beta * t.envelope;
  const double scale = calib.x_zpf_m * calib.x_zpf_m / gain;
  Spectrum out = spec;
  out.unit = PsdUnit::MetersSqPerHz;
  for (double& v : out.psd) v = scale * (v - 1.0);
  return out;
}

Spectrum synth_calibration_tone(const CalibrationChain& calib, double f_o_hz,
                                double p_cal_w, double eta_vc_det,
                                double center_hz, double fwhm_hz,
                                std::size_t points, double span_hz) {
  const double floor = shot_noise_floor_w_per_hz(calib, f_o_hz);
  const double step = span_hz / static_cast<double>(points - 1);
  Spectrum s = make_spectrum_grid(center_hz - 0.5 * span_hz, step, points);
  s.unit = PsdUnit::WattsPerHz;
  const double photon_energy = constants::planck_j_s * f_o_hz;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double s_cal = gaussian_psd(p_cal_w, fwhm_hz, center_hz,
                                      s.frequency_hz[i]);
    s.psd[i] = calib.dark_psd_w_per_hz +
               floor * (1.0 + eta_vc_det * s_cal / photon_energy);
  }
  return s;
}

}  // namespace omckit

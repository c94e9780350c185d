#pragma once

#include "omckit/physics.hpp"
#include "omckit/spectrum.hpp"

namespace omckit {

/// Detection-chain efficiencies and gains mapping detected PSD area to
/// absolute phonon occupancy.
struct CalibrationChain {
  double eta_12 = 1.0;   // circulator port 1 -> 2
  double eta_23 = 1.0;   // circulator port 2 -> 3
  double eta_cpl = 1.0;  // fiber <-> device coupling
  double eta_vc = 1.0;   // variable-coupler loss
  double eta_det = 1.0;  // detector quantum efficiency
  double detector_gain_v_per_w = 1.0e4;
  double load_impedance_ohm = 50.0;
  double lo_power_w = 0.7e-3;
  double input_power_w = 0.0;
  double dark_psd_w_per_hz = 0.0;
  double beta = 1.0;  // systematic area correction, divided out

  void validate() const;

  // x_zpf for displacement-unit conversion; set from the device in use.
  double x_zpf_m = 4.1e-15;
};

/// eta_cpl * eta_23 * eta_vc * eta_det.
double total_efficiency(const CalibrationChain& calib);

/// sqrt(P_PM / (eta_23 eta_12 P_in)); throws when the radicand exceeds 1.
double fiber_coupling_efficiency(double p_pm_w, double p_in_w, double eta_12,
                                 double eta_23);

/// (G_e^2 / R_L) * 2 h f_o P_LO: shot-noise floor in detector units.
double shot_noise_floor_w_per_hz(const CalibrationChain& calib, double f_o_hz);

/// eta_vc * eta_det from a detected calibration tone:
/// (h f_o / P_cal) * integral (S_II - S_noise)/(S_noise - S_dark) df.
/// The spectrum must be in detector units.
double receiver_efficiency(const Spectrum& s_ii, double s_noise_w_per_hz,
                           double s_dark_w_per_hz, double p_cal_w,
                           double f_o_hz);

/// Sideband-filter transduction for the in-band motional sideband.
/// A red-detuned probe selects the occupancy-proportional sideband
/// (vacuum_offset 0), a blue-detuned probe the (occupancy+1) sideband
/// (vacuum_offset 1); a resonant probe is treated as occupancy-proportional.
struct Transduction {
  double envelope = 1.0;  // normalized to 1 at the matched sideband
  int vacuum_offset = 0;
};
Transduction transduction(const DeviceParams& dev, double delta_hz);

struct HeterodyneGrid {
  double beat_hz = 50.0e6;   // receiver beat frequency Omega
  double span_hz = 0.0;      // 0: auto, 50x the expected FWHM
  std::size_t points = 1024;
};

/// Deterministic noiseless heterodyne NPSD in canonical quanta units:
/// flat shot-noise floor of 1 plus the Voigt peak whose calibrated area is
/// <n> (red) or <n>+1 (blue), scaled by total efficiency, beta, and the
/// sideband envelope. Gaussian jitter from the bath's jitter law, if any.
Spectrum heterodyne_psd(const DeviceParams& dev, const ProbeState& probe,
                        const BathModel& bath, const CalibrationChain& calib,
                        const HeterodyneGrid& grid = {});

/// Detected (quanta-unit) area -> occupancy: divides out total efficiency,
/// beta, and the sideband envelope, then subtracts the vacuum contribution
/// for a blue-detuned probe. Throws if that leaves occupancy < -1e-6.
double calibrate_occupancy(double area_quanta, const CalibrationChain& calib,
                           const DeviceParams& dev, const ProbeState& probe);

/// Inverse of calibrate_occupancy: detected quanta-unit area for a given
/// occupancy.
double detected_area(double occupancy, const CalibrationChain& calib,
                     const DeviceParams& dev, const ProbeState& probe);

/// Unit conversions at the boundary. Quanta -> watts adds the dark floor;
/// watts -> quanta removes it. Displacement conversion applies to the
/// mechanical signal above the shot-noise floor.
Spectrum to_detector_units(const Spectrum& spec, const CalibrationChain& calib,
                           double f_o_hz);
Spectrum to_quanta_units(const Spectrum& spec, const CalibrationChain& calib,
                         double f_o_hz);
Spectrum to_displacement_units(const Spectrum& spec,
                               const CalibrationChain& calib,
                               const DeviceParams& dev,
                               const ProbeState& probe);

/// Synthetic detector-unit spectrum of a calibration tone of optical power
/// p_cal_w and Gaussian width fwhm_hz, transduced with the given receiver
/// efficiency product. Used to exercise receiver_efficiency.
Spectrum synth_calibration_tone(const CalibrationChain& calib, double f_o_hz,
                                double p_cal_w, double eta_vc_det,
                                double center_hz, double fwhm_hz,
                                std::size_t points, double span_hz);

}  // namespace omckit

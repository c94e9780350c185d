#pragma once

#include <string>
#include <vector>

namespace omckit {

enum class PsdUnit {
  QuantaPerHz,   // canonical: (S_II - S_dark)/N_shot, flat floor = 1
  WattsPerHz,    // detector units at the analyzer input
  MetersSqPerHz  // displacement units via x_zpf^2
};

std::string to_string(PsdUnit unit);
PsdUnit psd_unit_from_string(const std::string& s);

struct ProbeRecord {
  double detuning_hz = 0.0;
  double n_c = 0.0;
  double t_f_k = 0.0;
  std::string timestamp;       // ISO 8601, informational only
  std::string calibration_id;  // free-form reference
};

/// Uniformly sampled one-sided noise power spectral density around the
/// heterodyne beat frequency.
struct Spectrum {
  std::vector<double> frequency_hz;  // strictly increasing, uniform
  std::vector<double> psd;
  PsdUnit unit = PsdUnit::QuantaPerHz;
  double rbw_hz = 0.0;
  ProbeRecord meta;

  std::size_t size() const { return psd.size(); }
  double f_start() const { return frequency_hz.front(); }
  double f_step() const;

  // length >= 16, finite samples, uniform positive step
  void validate() const;
};

/// Uniform grid helper for synthesis.
Spectrum make_spectrum_grid(double f_start_hz, double f_step_hz,
                            std::size_t n_points);

/// CSV with header `frequency_hz,psd,unit,rbw_hz` at 17 significant digits,
/// plus a JSON sidecar <path minus .csv>.json holding the probe record.
void write_spectrum_csv(const Spectrum& spec, const std::string& path);
Spectrum read_spectrum_csv(const std::string& path);

}  // namespace omckit

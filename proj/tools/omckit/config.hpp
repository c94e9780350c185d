#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "omckit/calibration.hpp"
#include "omckit/physics.hpp"

namespace omckit::cli {

struct SweepSpec {
  std::string variable;  // n_c | delta | T_f | T_p
  std::string scale = "log";
  double range_lo = 0.0;
  double range_hi = 0.0;
  int points = 0;

  std::vector<double> values() const;
};

struct NoiseSpec {
  std::uint64_t seed = 0;
  int n_avg = 0;  // 0: noiseless
};

struct SpectraSpec {
  bool emit = false;
  std::size_t points = 1024;
  double beat_hz = 50.0e6;
  double span_hz = 0.0;  // 0: auto
};

struct ContinuumSpec {
  double exponent_a = 3.0;
  double cutoff_t_c_k = 2.0;   // used if cutoff_omega_c_hz absent
  double cutoff_omega_c_hz = 0.0;
  double prefactor_hz = 1.0;
};

struct RunConfig {
  DeviceParams device;
  BathModel bath;
  CalibrationChain calibration;
  SweepSpec sweep;
  NoiseSpec noise;
  SpectraSpec spectra;
  std::vector<double> fridge_temperatures_k;  // defaults to [bath.t_f_k]
  std::vector<std::string> probes = {"red", "blue", "resonant"};
  double probe_n_c = 0.0;  // fixed n_c for delta sweeps
  ContinuumSpec continuum;
  std::string output_dir = "out";
  std::vector<std::string> formats = {"csv"};

  nlohmann::json raw;  // canonical parsed document, for hashing
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);

/// FNV-1a 64 over the canonical (sorted-key) JSON serialization.
std::string config_hash(const nlohmann::json& canonical);

}  // namespace omckit::cli

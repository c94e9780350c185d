#include "config.hpp"

#include <cmath>
#include <fstream>

#include "omckit/errors.hpp"

namespace omckit::cli {

namespace {

const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                              const std::string& path) {
  if (!j.contains(key))
    throw ValidationError("config: missing field '" + path + key + "'");
  return j.at(key);
}

double require_number(const nlohmann::json& j, const std::string& key,
                      const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_number())
    throw ValidationError("config: field '" + path + key +
                          "' must be a number");
  return v.get<double>();
}

double number_or(const nlohmann::json& j, const std::string& key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  if (points < 2)
    throw ValidationError("config: sweep.points must be >= 2, got " +
                          std::to_string(points));
  if (!(range_hi > range_lo))
    throw ValidationError("config: sweep.range must be positive-ordered");
  std::vector<double> out(points);
  if (scale == "log") {
    if (!(range_lo > 0.0))
      throw ValidationError("config: log sweep needs range_lo > 0");
    const double l0 = std::log(range_lo), l1 = std::log(range_hi);
    for (int i = 0; i < points; ++i)
      out[i] = std::exp(l0 + (l1 - l0) * i / double(points - 1));
  } else if (scale == "linear") {
    for (int i = 0; i < points; ++i)
      out[i] = range_lo + (range_hi - range_lo) * i / double(points - 1);
  } else {
    throw ValidationError("config: sweep.scale must be 'log' or 'linear'");
  }
  return out;
}

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.raw = j;

  const auto& dev = require(j, "device", "");
  cfg.device.g0_hz = require_number(dev, "g0_hz", "device.");
  cfg.device.kappa_hz = require_number(dev, "kappa_hz", "device.");
  cfg.device.kappa_e_hz = require_number(dev, "kappa_e_hz", "device.");
  cfg.device.kappa_i_hz = require_number(dev, "kappa_i_hz", "device.");
  cfg.device.omega_m_hz = require_number(dev, "omega_m_hz", "device.");
  cfg.device.lambda_c_m = require_number(dev, "lambda_c_m", "device.");
  try {
    cfg.device.validate();
  } catch (const DomainError& e) {
    throw ValidationError(std::string("config: device invalid: ") + e.what());
  }

  const auto& bath = require(j, "bath", "");
  cfg.bath.gamma_0_hz = require_number(bath, "gamma_0_hz", "bath.");
  cfg.bath.t_f_k = require_number(bath, "t_f_k", "bath.");
  cfg.bath.np_amplitude = require_number(bath, "np_amplitude", "bath.");
  cfg.bath.np_exponent = number_or(bath, "np_exponent", 0.25);
  if (bath.contains("gamma_p_law")) {
    const auto& law = bath.at("gamma_p_law");
    const std::string type = require(law, "type", "bath.gamma_p_law.")
                                 .get<std::string>();
    if (type == "activated") {
      cfg.bath.gamma_p_law = GammaPLaw::activated(
          require_number(law, "amplitude_hz_per_k", "bath.gamma_p_law."),
          require_number(law, "t_c_k", "bath.gamma_p_law."));
    } else if (type == "tabulated") {
      const auto t = require(law, "t_p_k", "bath.gamma_p_law.")
                         .get<std::vector<double>>();
      const auto g = require(law, "gamma_p_hz", "bath.gamma_p_law.")
                         .get<std::vector<double>>();
      try {
        cfg.bath.gamma_p_law = GammaPLaw::tabulated(t, g);
      } catch (const Error& e) {
        throw ValidationError(std::string("config: bath.gamma_p_law: ") +
                              e.what());
      }
    } else if (type == "none") {
      cfg.bath.gamma_p_law = GammaPLaw();
    } else {
      throw ValidationError("config: bath.gamma_p_law.type must be "
                            "'activated', 'tabulated', or 'none'");
    }
  }
  if (bath.contains("jitter_law")) {
    const auto& jl = bath.at("jitter_law");
    cfg.bath.jitter_law =
        JitterLaw{require_number(jl, "amplitude_hz", "bath.jitter_law."),
                  require_number(jl, "exponent", "bath.jitter_law.")};
  }
  try {
    cfg.bath.validate();
  } catch (const DomainError& e) {
    throw ValidationError(std::string("config: bath invalid: ") + e.what());
  }

  if (j.contains("calibration")) {
    const auto& cal = j.at("calibration");
    cfg.calibration.eta_12 = number_or(cal, "eta_12", 1.0);
    cfg.calibration.eta_23 = number_or(cal, "eta_23", 1.0);
    cfg.calibration.eta_cpl = number_or(cal, "eta_cpl", 1.0);
    cfg.calibration.eta_vc = number_or(cal, "eta_vc", 1.0);
    cfg.calibration.eta_det = number_or(cal, "eta_det", 1.0);
    cfg.calibration.detector_gain_v_per_w =
        number_or(cal, "detector_gain_v_per_w", 1.0e4);
    cfg.calibration.load_impedance_ohm =
        number_or(cal, "load_impedance_ohm", 50.0);
    cfg.calibration.lo_power_w = number_or(cal, "lo_power_w", 0.7e-3);
    cfg.calibration.input_power_w = number_or(cal, "input_power_w", 0.0);
    cfg.calibration.dark_psd_w_per_hz =
        number_or(cal, "dark_psd_w_per_hz", 0.0);
    cfg.calibration.beta = number_or(cal, "beta", 1.0);
    cfg.calibration.x_zpf_m = number_or(cal, "x_zpf_m", 4.1e-15);
    try {
      cfg.calibration.validate();
    } catch (const DomainError& e) {
      throw ValidationError(std::string("config: calibration invalid: ") +
                            e.what());
    }
  }

  if (j.contains("sweep")) {
    const auto& sw = j.at("sweep");
    cfg.sweep.variable = require(sw, "variable", "sweep.").get<std::string>();
    if (cfg.sweep.variable != "n_c" && cfg.sweep.variable != "delta" &&
        cfg.sweep.variable != "T_f" && cfg.sweep.variable != "T_p")
      throw ValidationError(
          "config: sweep.variable must be one of n_c, delta, T_f, T_p");
    cfg.sweep.scale = sw.value("scale", std::string("log"));
    const auto& range = require(sw, "range", "sweep.");
    if (!range.is_array() || range.size() != 2)
      throw ValidationError("config: sweep.range must be [lo, hi]");
    cfg.sweep.range_lo = range[0].get<double>();
    cfg.sweep.range_hi = range[1].get<double>();
    cfg.sweep.points = require(sw, "points", "sweep.").get<int>();
    cfg.sweep.values();  // validate now, fail early
  }

  if (j.contains("noise")) {
    cfg.noise.seed = j.at("noise").value("seed", 0ULL);
    cfg.noise.n_avg = j.at("noise").value("n_avg", 0);
    if (cfg.noise.n_avg < 0)
      throw ValidationError("config: noise.n_avg must be >= 0");
  }

  if (j.contains("spectra")) {
    const auto& sp = j.at("spectra");
    cfg.spectra.emit = sp.value("emit", false);
    cfg.spectra.points = sp.value("points", std::size_t(1024));
    cfg.spectra.beat_hz = number_or(sp, "beat_hz", 50.0e6);
    cfg.spectra.span_hz = number_or(sp, "span_hz", 0.0);
    if (cfg.spectra.points < 16)
      throw ValidationError("config: spectra.points must be >= 16");
  }

  if (j.contains("fridge_temperatures_k"))
    cfg.fridge_temperatures_k =
        j.at("fridge_temperatures_k").get<std::vector<double>>();
  else
    cfg.fridge_temperatures_k = {cfg.bath.t_f_k};
  for (double t : cfg.fridge_temperatures_k)
    if (t < 0.0)
      throw ValidationError("config: fridge temperatures must be >= 0");

  if (j.contains("probes")) {
    cfg.probes = j.at("probes").get<std::vector<std::string>>();
    for (const auto& p : cfg.probes)
      if (p != "red" && p != "blue" && p != "resonant")
        throw ValidationError("config: probes entries must be red, blue, or "
                              "resonant; got '" + p + "'");
  }
  cfg.probe_n_c = number_or(j, "probe_n_c", 0.0);

  if (j.contains("continuum")) {
    const auto& c = j.at("continuum");
    cfg.continuum.exponent_a = number_or(c, "exponent_a", 3.0);
    cfg.continuum.cutoff_t_c_k = number_or(c, "cutoff_t_c_k", 2.0);
    cfg.continuum.cutoff_omega_c_hz = number_or(c, "cutoff_omega_c_hz", 0.0);
    cfg.continuum.prefactor_hz = number_or(c, "prefactor_hz", 1.0);
  }

  if (j.contains("outputs")) {
    cfg.output_dir = j.at("outputs").value("dir", std::string("out"));
    if (j.at("outputs").contains("formats"))
      cfg.formats = j.at("outputs").at("formats").get<std::vector<std::string>>();
  }
  for (const auto& f : cfg.formats)
    if (f != "csv" && f != "svg")
      throw ValidationError("config: outputs.formats entries must be csv or "
                            "svg; got '" + f + "'");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

std::string config_hash(const nlohmann::json& canonical) {
  const std::string s = canonical.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace omckit::cli

#include "omckit/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omckit/errors.hpp"

namespace omckit {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sidecar_path(const std::string& csv_path) {
  if (csv_path.size() >= 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  return csv_path + ".json";
}

}  // namespace

std::string to_string(PsdUnit unit) {
  switch (unit) {
    case PsdUnit::QuantaPerHz: return "quanta_per_hz";
    case PsdUnit::WattsPerHz: return "w_per_hz";
    case PsdUnit::MetersSqPerHz: return "m2_per_hz";
  }
  return "quanta_per_hz";
}

PsdUnit psd_unit_from_string(const std::string& s) {
  if (s == "quanta_per_hz") return PsdUnit::QuantaPerHz;
  if (s == "w_per_hz") return PsdUnit::WattsPerHz;
  if (s == "m2_per_hz") return PsdUnit::MetersSqPerHz;
  throw ValidationError("unknown PSD unit '" + s + "'");
}

double Spectrum::f_step() const {
  if (frequency_hz.size() < 2)
    throw ValidationError("Spectrum: need >= 2 samples for f_step");
  return (frequency_hz.back() - frequency_hz.front()) /
         static_cast<double>(frequency_hz.size() - 1);
}

void Spectrum::validate() const {
  if (psd.size() != frequency_hz.size())
    throw ValidationError("Spectrum: frequency/psd length mismatch");
  if (psd.size() < 16)
    throw ValidationError("Spectrum: need at least 16 samples, got " +
                          std::to_string(psd.size()));
  const double step = f_step();
  if (!(step > 0.0)) throw ValidationError("Spectrum: f_step must be > 0");
  for (std::size_t i = 0; i < psd.size(); ++i) {
    if (!std::isfinite(psd[i]))
      throw ValidationError("Spectrum: non-finite sample at index " +
                            std::to_string(i));
    const double expected = frequency_hz.front() + step * i;
    if (std::fabs(frequency_hz[i] - expected) >
        1e-6 * step + 1e-12 * std::fabs(expected))
      throw ValidationError("Spectrum: non-uniform grid at index " +
                            std::to_string(i));
  }
  if (!(rbw_hz >= 0.0)) throw ValidationError("Spectrum: rbw must be >= 0");
}

Spectrum make_spectrum_grid(double f_start_hz, double f_step_hz,
                            std::size_t n_points) {
  if (!(f_step_hz > 0.0) || n_points < 16)
    throw ValidationError("make_spectrum_grid: need step > 0 and >= 16 points");
  Spectrum s;
  s.frequency_hz.resize(n_points);
  s.psd.assign(n_points, 0.0);
  for (std::size_t i = 0; i < n_points; ++i)
    s.frequency_hz[i] = f_start_hz + f_step_hz * static_cast<double>(i);
  s.rbw_hz = f_step_hz;
  return s;
}

void write_spectrum_csv(const Spectrum& spec, const std::string& path) {
  spec.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "frequency_hz,psd,unit,rbw_hz\n";
  const std::string unit = to_string(spec.unit);
  const std::string rbw = fmt17(spec.rbw_hz);
  for (std::size_t i = 0; i < spec.size(); ++i)
    out << fmt17(spec.frequency_hz[i]) << ',' << fmt17(spec.psd[i]) << ','
        << unit << ',' << rbw << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
  out.close();

  nlohmann::json meta = {
      {"detuning_hz", spec.meta.detuning_hz},
      {"n_c", spec.meta.n_c},
      {"t_f_k", spec.meta.t_f_k},
      {"timestamp", spec.meta.timestamp},
      {"calibration_id", spec.meta.calibration_id},
  };
  std::ofstream side(sidecar_path(path));
  if (!side) throw IoError("cannot open sidecar for '" + path + "'");
  side << meta.dump(2) << '\n';
}

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(path + ":1: empty spectrum file");
  if (line != "frequency_hz,psd,unit,rbw_hz")
    throw ValidationError(path + ":1: bad header '" + line + "'");

  Spectrum s;
  bool unit_set = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string f_str, p_str, u_str, r_str;
    if (!std::getline(row, f_str, ',') || !std::getline(row, p_str, ',') ||
        !std::getline(row, u_str, ',') || !std::getline(row, r_str))
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 4 columns");
    char* end = nullptr;
    const double f = std::strtod(f_str.c_str(), &end);
    if (end == f_str.c_str() || *end != '\0')
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": bad frequency '" + f_str + "'");
    const double p = std::strtod(p_str.c_str(), &end);
    if (end == p_str.c_str() || *end != '\0')
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": bad psd '" + p_str + "'");
    const double r = std::strtod(r_str.c_str(), &end);
    if (end == r_str.c_str() || *end != '\0')
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": bad rbw '" + r_str + "'");
    const PsdUnit u = psd_unit_from_string(u_str);
    if (!unit_set) {
      s.unit = u;
      s.rbw_hz = r;
      unit_set = true;
    } else if (u != s.unit) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": mixed units in one spectrum");
    }
    s.frequency_hz.push_back(f);
    s.psd.push_back(p);
  }
  s.validate();

  std::ifstream side(sidecar_path(path));
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side, nullptr, true, true);
    s.meta.detuning_hz = meta.value("detuning_hz", 0.0);
    s.meta.n_c = meta.value("n_c", 0.0);
    s.meta.t_f_k = meta.value("t_f_k", 0.0);
    s.meta.timestamp = meta.value("timestamp", "");
    s.meta.calibration_id = meta.value("calibration_id", "");
  }
  return s;
}

}  // namespace omckit

#include <cmath>

#include "commands.hpp"
#include "omckit/bath.hpp"
#include "omckit/constants.hpp"
#include "omckit/errors.hpp"

namespace omckit::cli {

int run_phonon(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (!args.formats.empty()) cfg.formats = args.formats;

  if (cfg.sweep.variable != "T_p")
    throw ValidationError("config: phonon requires a sweep over T_p");
  const std::vector<double> temps = cfg.sweep.values();
  for (double t : temps)
    if (!(t > 0.0))
      throw ValidationError("config: phonon sweep temperatures must be > 0");

  ContinuumBath bath;
  bath.exponent_a = cfg.continuum.exponent_a;
  bath.prefactor_hz = cfg.continuum.prefactor_hz;
  bath.omega_c_hz =
      cfg.continuum.cutoff_omega_c_hz > 0.0
          ? cfg.continuum.cutoff_omega_c_hz
          : cfg.continuum.cutoff_t_c_k / constants::quantum_temperature_k(1.0);
  bath.validate();
  const double omega_m = cfg.device.omega_m_hz;

  Table t;
  t.name = "phonon";
  t.columns = {"t_p_k",          "x_c",          "mixing_integral",
               "gamma_p_hz",     "gamma_low_hz", "gamma_high_hz",
               "ratio_low",      "ratio_high"};
  for (double tp : temps) {
    const double x_c = bath.cutoff_temperature_k() / tp;
    const double integral = boson_mixing_integral(bath.exponent_a, x_c);
    const double exact = gamma_p_integral(bath, omega_m, tp);
    const double low = gamma_p_low_t(bath, omega_m, tp);
    const double high = gamma_p_high_t(bath, omega_m, tp);
    t.rows.push_back({tp, x_c, integral, exact, low, high, low / exact,
                      high / exact});
  }

  ReportBundle bundle;
  bundle.tables.push_back(std::move(t));
  bundle.provenance = make_provenance(cfg.raw);
  bundle.provenance["command"] = "phonon";
  write_bundle(bundle, cfg.output_dir, cfg.formats);
  return 0;
}

}  // namespace omckit::cli

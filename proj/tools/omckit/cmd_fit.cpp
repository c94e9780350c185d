#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "commands.hpp"
#include "omckit/errors.hpp"
#include "omckit/fits.hpp"
#include "omckit/lineshape.hpp"
#include "omckit/spectrum.hpp"

namespace omckit::cli {

namespace {

std::size_t column_index(const Table& t, const std::string& name,
                         bool required = true) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) {
    if (required)
      throw ValidationError("table '" + t.name + "': missing column '" + name +
                            "'");
    return static_cast<std::size_t>(-1);
  }
  return static_cast<std::size_t>(it - t.columns.begin());
}

// first present column among aliases (supports fitting simulate output
// directly, e.g. `area` vs `area_quanta`)
std::size_t column_index_any(const Table& t,
                             const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const std::size_t ci = column_index(t, n, false);
    if (ci != static_cast<std::size_t>(-1)) return ci;
  }
  throw ValidationError("table '" + t.name + "': missing column '" +
                        names.front() + "'");
}

Table lineshape_overlay(const Spectrum& spec, const LineshapeParams& p,
                        const std::string& name) {
  Table t;
  t.name = name;
  t.columns = {"frequency_hz", "psd", "model", "residual"};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double model = voigt_psd(p, spec.frequency_hz[i]);
    t.rows.push_back({spec.frequency_hz[i], spec.psd[i], model,
                      spec.psd[i] - model});
  }
  return t;
}

int fit_spectra(const FitArgs& args, const RunConfig* cfg, bool voigt,
                ReportBundle& bundle) {
  (void)cfg;
  const LineshapeFitOptions opts;

  struct Slot {
    FitResult result;
    LineshapeParams params;
    bool has_overlay = false;
    Spectrum spec;
    std::string stem;
  };
  std::vector<Slot> slots(args.inputs.size());

  // per-file fits run concurrently; outputs are emitted in input order
  const auto fit_one = [&](std::size_t i) {
    Slot& slot = slots[i];
    slot.spec = read_spectrum_csv(args.inputs[i]);
    slot.stem = std::filesystem::path(args.inputs[i]).stem().string();
    try {
      const LineshapeFit fit =
          voigt ? fit_voigt(slot.spec, opts) : fit_lorentzian(slot.spec, opts);
      slot.result = fit.result;
      slot.params = fit.params;
      slot.has_overlay = true;
    } catch (const NoPeakError& e) {
      slot.result.converged = false;
      slot.result.warnings.push_back(e.what());
    }
  };

  const int workers = std::max(args.workers, 1);
  if (workers == 1 || args.inputs.size() < 2) {
    for (std::size_t i = 0; i < args.inputs.size(); ++i) fit_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < args.inputs.size();
             i = next.fetch_add(1)) {
          try {
            fit_one(i);
          } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (auto& slot : slots) {
    if (slot.has_overlay)
      bundle.tables.push_back(
          lineshape_overlay(slot.spec, slot.params, "overlay_" + slot.stem));
    bundle.fits.emplace_back("fit_" + slot.stem, slot.result.to_json());
  }
  return 0;
}

int fit_jitter_series(const FitArgs& args, const RunConfig& cfg,
                      ReportBundle& bundle) {
  // width-vs-detuning series with the cooperativity constrained
  const Table t = read_table_csv(args.inputs.at(0));
  const auto ci_d = column_index(t, "delta_hz");
  const auto ci_w = column_index(t, "fwhm_hz");
  const auto ci_e = column_index(t, "fwhm_err_hz", false);
  std::vector<DetuningWidthPoint> pts;
  for (const auto& row : t.rows) {
    DetuningWidthPoint p;
    p.delta_hz = row[ci_d];
    p.fwhm_hz = row[ci_w];
    if (ci_e != static_cast<std::size_t>(-1) && !std::isnan(row[ci_e]))
      p.fwhm_err_hz = row[ci_e];
    if (std::isnan(p.delta_hz) || std::isnan(p.fwhm_hz)) continue;
    pts.push_back(p);
  }
  const double n_c = args.fixed_n_c > 0.0 ? args.fixed_n_c : cfg.probe_n_c;
  FitResult result = fit_jitter_vs_detuning(pts, cfg.device, n_c,
                                            args.constraint_c);
  Table overlay;
  overlay.name = "overlay_jitter";
  overlay.columns = {"delta_hz", "fwhm_hz", "model_fwhm_hz",
                     "model_no_jitter_hz"};
  const double gi = result.parameters.at("gamma_i_hz");
  const double gg = result.parameters.at("gamma_g_hz");
  for (const auto& p : pts) {
    const double shape = gamma_om(cfg.device, {p.delta_hz, 1.0}) /
                         gamma_om(cfg.device, {cfg.device.omega_m_hz, 1.0});
    const double gl = gi * (1.0 + args.constraint_c * shape);
    overlay.rows.push_back({p.delta_hz, p.fwhm_hz, voigt_fwhm(gl, gg),
                            voigt_fwhm(gl, 0.0)});
  }
  bundle.tables.push_back(std::move(overlay));
  bundle.fits.emplace_back("fit_jitter", result.to_json());
  return 0;
}

int fit_power_law_cmd(const FitArgs& args, ReportBundle& bundle) {
  const Table t = read_table_csv(args.inputs.at(0));
  const auto ci_x = column_index(t, "x");
  const auto ci_y = column_index(t, "y");
  const auto ci_e = column_index(t, "y_err", false);
  std::vector<double> x, y, err;
  for (const auto& row : t.rows) {
    if (std::isnan(row[ci_x]) || std::isnan(row[ci_y])) continue;
    x.push_back(row[ci_x]);
    y.push_back(row[ci_y]);
    if (ci_e != static_cast<std::size_t>(-1) && !std::isnan(row[ci_e]))
      err.push_back(row[ci_e]);
  }
  if (!err.empty() && err.size() != x.size())
    throw ValidationError("power-law: y_err present on only some rows");
  const PowerLawFit fit = fit_power_law(x, y, err);
  Table overlay;
  overlay.name = "overlay_power_law";
  overlay.columns = {"x", "y", "model", "residual"};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = fit.amplitude * std::pow(x[i], fit.exponent);
    overlay.rows.push_back({x[i], y[i], m, y[i] - m});
  }
  bundle.tables.push_back(std::move(overlay));
  bundle.fits.emplace_back("fit_power_law", fit.result.to_json());
  return 0;
}

int fit_detuning_cmd(const FitArgs& args, const RunConfig& cfg,
                     ReportBundle& bundle) {
  const Table t = read_table_csv(args.inputs.at(0));
  const auto ci_d = column_index(t, "delta_hz");
  const auto ci_a = column_index_any(t, {"area", "area_quanta"});
  const auto ci_e = column_index(t, "area_err", false);
  std::vector<AreaDetuningPoint> pts;
  for (const auto& row : t.rows) {
    if (std::isnan(row[ci_d]) || std::isnan(row[ci_a])) continue;
    AreaDetuningPoint p;
    p.delta_hz = row[ci_d];
    p.area = row[ci_a];
    if (ci_e != static_cast<std::size_t>(-1) && !std::isnan(row[ci_e]))
      p.area_err = row[ci_e];
    pts.push_back(p);
  }
  const double n_c = args.fixed_n_c > 0.0 ? args.fixed_n_c : cfg.probe_n_c;
  const AreaDetuningFit fit = fit_area_vs_detuning(pts, cfg.device, n_c);
  nlohmann::json doc = fit.result.to_json();
  doc["null_amplitude"] = fit.null_amplitude;
  doc["null_residual_norm"] = fit.null_residual_norm;
  Table overlay;
  overlay.name = "overlay_detuning";
  overlay.columns = {"delta_hz", "area", "model", "null_model"};
  for (const auto& p : pts) {
    const double env = transduction(cfg.device, p.delta_hz).envelope;
    const double shape = gamma_om(cfg.device, {p.delta_hz, 1.0}) /
                         gamma_om(cfg.device, {cfg.device.omega_m_hz, 1.0});
    const double denom = std::max(1.0 + fit.cooperativity * shape, 1e-4);
    overlay.rows.push_back({p.delta_hz, p.area, fit.amplitude * env / denom,
                            fit.null_amplitude * env});
  }
  bundle.tables.push_back(std::move(overlay));
  bundle.fits.emplace_back("fit_detuning", doc);
  return 0;
}

std::vector<CoolingCurvePoint> read_cooling_points(const Table& t) {
  const auto ci_nc = column_index(t, "n_c");
  const auto ci_occ = column_index(t, "occupancy", false);
  const auto ci_oe = column_index(t, "occupancy_err", false);
  const auto ci_lw = column_index(t, "linewidth_hz", false);
  const auto ci_le = column_index(t, "linewidth_err_hz", false);
  const auto ci_sign = column_index(t, "detuning_sign", false);
  const auto ci_tf = column_index(t, "t_f_k", false);
  const auto get = [&](const std::vector<double>& row, std::size_t ci,
                       double dflt) {
    return ci == static_cast<std::size_t>(-1) || std::isnan(row[ci])
               ? dflt
               : row[ci];
  };
  std::vector<CoolingCurvePoint> pts;
  for (const auto& row : t.rows) {
    if (std::isnan(row[ci_nc])) continue;
    CoolingCurvePoint p;
    p.n_c = row[ci_nc];
    p.occupancy = get(row, ci_occ, 0.0);
    p.occupancy_err = get(row, ci_oe, 0.0);
    p.linewidth_hz = get(row, ci_lw, 0.0);
    p.linewidth_err_hz = get(row, ci_le, 0.0);
    p.detuning_sign = static_cast<int>(get(row, ci_sign, +1.0));
    p.t_f_k = get(row, ci_tf, 0.0);
    pts.push_back(p);
  }
  return pts;
}

int fit_g0_cmd(const FitArgs& args, const RunConfig& cfg,
               ReportBundle& bundle) {
  const Table t = read_table_csv(args.inputs.at(0));
  const std::vector<CoolingCurvePoint> pts = read_cooling_points(t);
  const FitResult diff =
      fit_g0_from_linewidths(pts, cfg.device, G0Estimator::LinewidthDifference);
  nlohmann::json doc = diff.to_json();
  const bool has_occ = std::any_of(
      pts.begin(), pts.end(),
      [](const CoolingCurvePoint& p) { return p.occupancy > 0.0; });
  if (has_occ) {
    try {
      const FitResult coop = fit_g0_from_linewidths(
          pts, cfg.device, G0Estimator::CalibratedCooperativity);
      doc["cooperativity_estimator"] = coop.to_json();
    } catch (const InsufficientDataError&) {
      // occupancy columns too sparse for the second estimator; keep primary
    }
  }
  bundle.fits.emplace_back("fit_g0", doc);
  return 0;
}

int fit_bath_cmd(const FitArgs& args, const RunConfig& cfg,
                 ReportBundle& bundle) {
  const Table t = read_table_csv(args.inputs.at(0));
  std::vector<CoolingCurvePoint> pts = read_cooling_points(t);
  BathFitOptions opts;
  opts.per_point = args.per_point;
  const BathModelFit fit = fit_bath_model(
      pts, cfg.device, cfg.bath.np_amplitude, cfg.bath.np_exponent, opts);
  nlohmann::json doc = fit.result.to_json();
  doc["gamma_0_hz"] = fit.gamma_0_hz;
  doc["gamma_0_sigma_hz"] = fit.gamma_0_sigma_hz;

  Table knots;
  knots.name = "gamma_p_table";
  knots.columns = {"n_c", "gamma_p_hz", "gamma_p_log_sigma"};
  for (std::size_t k = 0; k < fit.knot_n_c.size(); ++k)
    knots.rows.push_back({fit.knot_n_c[k], fit.knot_gamma_p_hz[k],
                          fit.knot_gamma_p_log_sigma[k]});
  bundle.tables.push_back(std::move(knots));

  Table overlay;
  overlay.name = "overlay_bath_model";
  overlay.columns = {"t_f_k", "n_c", "occupancy", "model"};
  for (const auto& p : pts) {
    double model = std::nan("");
    try {
      model = fit.occupancy(cfg.device, p.n_c, p.t_f_k, p.detuning_sign);
    } catch (const InstabilityError&) {
    }
    overlay.rows.push_back({p.t_f_k, p.n_c, p.occupancy, model});
  }
  bundle.tables.push_back(std::move(overlay));
  bundle.fits.emplace_back("fit_bath_model", doc);
  return 0;
}

}  // namespace

int run_fit(const FitArgs& args) {
  if (args.inputs.empty())
    throw ValidationError("fit: at least one input file is required");
  RunConfig cfg;
  const bool needs_config = args.mode == "detuning" || args.mode == "g0" ||
                            args.mode == "bath-model" ||
                            (args.mode == "voigt" && args.constraint_c >= 0.0);
  if (!args.config_path.empty())
    cfg = load_config(args.config_path);
  else if (needs_config)
    throw ValidationError("fit: mode '" + args.mode + "' requires --config");

  ReportBundle bundle;
  int rc = 0;
  if (args.mode == "lorentzian") {
    rc = fit_spectra(args, nullptr, false, bundle);
  } else if (args.mode == "voigt") {
    rc = args.constraint_c >= 0.0 ? fit_jitter_series(args, cfg, bundle)
                                  : fit_spectra(args, nullptr, true, bundle);
  } else if (args.mode == "power-law") {
    rc = fit_power_law_cmd(args, bundle);
  } else if (args.mode == "detuning") {
    rc = fit_detuning_cmd(args, cfg, bundle);
  } else if (args.mode == "g0") {
    rc = fit_g0_cmd(args, cfg, bundle);
  } else if (args.mode == "bath-model") {
    rc = fit_bath_cmd(args, cfg, bundle);
  } else {
    throw ValidationError("fit: unknown mode '" + args.mode + "'");
  }

  nlohmann::json cfg_doc = cfg.raw.is_null() ? nlohmann::json::object()
                                             : cfg.raw;
  bundle.provenance = make_provenance(cfg_doc);
  bundle.provenance["command"] = "fit";
  bundle.provenance["mode"] = args.mode;
  const std::string out = args.out_dir.empty() ? "out" : args.out_dir;
  const std::vector<std::string> formats =
      args.formats.empty() ? std::vector<std::string>{"csv"} : args.formats;
  write_bundle(bundle, out, formats);
  return rc;
}

}  // namespace omckit::cli

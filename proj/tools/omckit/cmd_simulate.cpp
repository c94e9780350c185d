#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "commands.hpp"
#include "omckit/calibration.hpp"
#include "omckit/errors.hpp"
#include "omckit/lineshape.hpp"
#include "omckit/noise.hpp"
#include "omckit/physics.hpp"
#include "omckit/spectrum.hpp"

namespace omckit::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PointTask {
  std::size_t t_index = 0;
  std::size_t s_index = 0;
  std::size_t p_index = 0;  // 0 red, 1 blue, 2 resonant, 3 swept-delta
  double t_f_k = 0.0;
  double n_c = 0.0;
  double delta_hz = 0.0;
};

struct PointResult {
  bool stable = false;
  OccupancyDetail det;
  double gamma_g_hz = 0.0;
  double fwhm_hz = 0.0;
  double area = 0.0;
  double occupancy_meas = kNaN, occupancy_err = kNaN;
  double linewidth_meas = kNaN, linewidth_err = kNaN;
  double fwhm_meas = kNaN, fwhm_err = kNaN;
  double area_meas = kNaN, area_err = kNaN;
};

int sign_of(double delta_hz) {
  if (delta_hz > 0.0) return +1;
  if (delta_hz < 0.0) return -1;
  return 0;
}

void run_point(const RunConfig& cfg, const PointTask& task, std::uint64_t seed,
               std::size_t n_sweep, PointResult& out) {
  BathModel bath = cfg.bath;
  bath.t_f_k = task.t_f_k;
  const ProbeState probe{task.delta_hz, task.n_c};
  try {
    out.det = mode_occupancy_detail(cfg.device, probe, bath);
  } catch (const InstabilityError&) {
    out.stable = false;
    return;
  }
  out.stable = true;
  out.gamma_g_hz =
      bath.jitter_law ? (*bath.jitter_law)(out.det.t_p_k) : 0.0;
  out.fwhm_hz = voigt_fwhm(out.det.gamma_total_hz, out.gamma_g_hz);
  out.area = detected_area(out.det.occupancy, cfg.calibration, cfg.device,
                           probe);

  const std::uint64_t stream =
      ((task.t_index * n_sweep + task.s_index) * 4 + task.p_index);
  const double rel =
      cfg.noise.n_avg > 0 ? 1.0 / std::sqrt(double(cfg.noise.n_avg)) : 0.0;
  const CounterRng rng(seed);
  const auto measure = [&](double truth, std::uint64_t q, double& meas,
                           double& err) {
    if (rel > 0.0) {
      meas = truth * (1.0 + rel * rng.gaussian(stream, q));
      err = std::fabs(truth) * rel;
    } else {
      meas = truth;
      err = 0.0;
    }
  };
  measure(out.det.occupancy, 0, out.occupancy_meas, out.occupancy_err);
  measure(out.det.gamma_total_hz, 1, out.linewidth_meas, out.linewidth_err);
  measure(out.fwhm_hz, 2, out.fwhm_meas, out.fwhm_err);
  measure(out.area, 3, out.area_meas, out.area_err);
}

}  // namespace

int run_simulate(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (!args.formats.empty()) cfg.formats = args.formats;
  const std::uint64_t seed = args.seed_set ? args.seed : cfg.noise.seed;

  if (cfg.sweep.variable.empty())
    throw ValidationError("config: simulate requires a sweep block");
  const std::vector<double> sweep = cfg.sweep.values();

  // build the task list; a T_f sweep replaces the fridge-temperature list
  std::vector<PointTask> tasks;
  const bool delta_sweep = cfg.sweep.variable == "delta";
  const bool tf_sweep = cfg.sweep.variable == "T_f";
  std::vector<double> temps = cfg.fridge_temperatures_k;
  if (tf_sweep) temps = {0.0};  // placeholder, overridden per point

  const auto probe_index = [](const std::string& p) -> std::size_t {
    if (p == "red") return 0;
    if (p == "blue") return 1;
    return 2;
  };

  for (std::size_t ti = 0; ti < temps.size(); ++ti) {
    for (std::size_t si = 0; si < sweep.size(); ++si) {
      const double t_f = tf_sweep ? sweep[si] : temps[ti];
      if (delta_sweep) {
        if (!(cfg.probe_n_c > 0.0))
          throw ValidationError(
              "config: delta sweep requires probe_n_c > 0");
        tasks.push_back({ti, si, 3, t_f, cfg.probe_n_c, sweep[si]});
        continue;
      }
      double n_c;
      if (cfg.sweep.variable == "n_c") {
        n_c = sweep[si];
      } else if (cfg.sweep.variable == "T_p") {
        // map T_p back to n_c through the absorption-bath law
        const double np = bose_einstein(cfg.device.omega_m_hz, sweep[si]);
        n_c = std::pow(np / cfg.bath.np_amplitude,
                       1.0 / cfg.bath.np_exponent);
      } else {  // T_f sweep
        n_c = cfg.probe_n_c > 0.0 ? cfg.probe_n_c : 1.0;
      }
      for (const auto& p : cfg.probes) {
        const std::size_t pi = probe_index(p);
        const double delta = pi == 0 ? cfg.device.omega_m_hz
                             : pi == 1 ? -cfg.device.omega_m_hz
                                       : 0.0;
        tasks.push_back({ti, si, pi, t_f, n_c, delta});
      }
    }
  }

  // evaluate, optionally in parallel; slot order is the task order
  std::vector<PointResult> results(tasks.size());
  const int workers = std::max(args.workers, 1);
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      run_point(cfg, tasks[i], seed, sweep.size(), results[i]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size();
             i = next.fetch_add(1))
          run_point(cfg, tasks[i], seed, sweep.size(), results[i]);
      });
    for (auto& th : pool) th.join();
  }

  Table series;
  series.name = "series";
  series.columns = {"t_f_k",          "sweep_value",     "n_c",
                    "delta_hz",       "detuning_sign",   "occupancy",
                    "occupancy_err",  "occupancy_model", "linewidth_hz",
                    "linewidth_err_hz", "linewidth_model_hz", "fwhm_hz",
                    "fwhm_err_hz",    "fwhm_model_hz",   "gamma_om_hz",
                    "gamma_p_hz",     "gamma_g_hz",      "t_p_k",
                    "n_p",            "area_quanta",     "area_err",
                    "stable"};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const auto& r = results[i];
    if (!r.stable) {
      series.rows.push_back({t.t_f_k, sweep[t.s_index], t.n_c, t.delta_hz,
                             double(sign_of(t.delta_hz)), kNaN, kNaN, kNaN,
                             kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
                             kNaN, kNaN, kNaN, kNaN, kNaN, 0.0});
      continue;
    }
    series.rows.push_back(
        {t.t_f_k, sweep[t.s_index], t.n_c, t.delta_hz,
         double(sign_of(t.delta_hz)), r.occupancy_meas, r.occupancy_err,
         r.det.occupancy, r.linewidth_meas, r.linewidth_err,
         r.det.gamma_total_hz, r.fwhm_meas, r.fwhm_err, r.fwhm_hz,
         r.det.gamma_om_hz, r.det.gamma_p_hz, r.gamma_g_hz, r.det.t_p_k,
         r.det.n_p, r.area_meas, r.area_err, 1.0});
  }

  // asymmetry rows wherever a (red, blue) pair is stable
  Table asym;
  asym.name = "asymmetry";
  asym.columns = {"t_f_k", "n_c", "xi", "xi_err", "xi_model"};
  if (!delta_sweep) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].p_index != 0 || !results[i].stable) continue;
      for (std::size_t jj = 0; jj < tasks.size(); ++jj) {
        if (tasks[jj].p_index != 1 || !results[jj].stable) continue;
        if (tasks[jj].t_index != tasks[i].t_index ||
            tasks[jj].s_index != tasks[i].s_index)
          continue;
        const auto& red = results[i];
        const auto& blue = results[jj];
        const double xi_model =
            (blue.det.occupancy + 1.0) / red.det.occupancy - 1.0;
        const double xi = (blue.occupancy_meas + 1.0) / red.occupancy_meas - 1.0;
        const double rel_b =
            blue.occupancy_err / std::max(blue.occupancy_meas + 1.0, 1e-12);
        const double rel_r =
            red.occupancy_err / std::max(std::fabs(red.occupancy_meas), 1e-12);
        const double xi_err =
            std::fabs(xi + 1.0) * std::sqrt(rel_b * rel_b + rel_r * rel_r);
        asym.rows.push_back({tasks[i].t_f_k, tasks[i].n_c, xi, xi_err,
                             xi_model});
        break;
      }
    }
  }

  ReportBundle bundle;
  bundle.tables.push_back(std::move(series));
  if (!asym.rows.empty()) bundle.tables.push_back(std::move(asym));
  nlohmann::json cfg_doc = cfg.raw;
  if (args.seed_set) cfg_doc["noise"]["seed"] = seed;
  bundle.provenance = make_provenance(cfg_doc);
  bundle.provenance["command"] = "simulate";

  write_bundle(bundle, cfg.output_dir, cfg.formats);

  // config echo so plotdata/fit can recover the model
  {
    ensure_dir(cfg.output_dir);
    std::ofstream echo(cfg.output_dir + "/config_echo.json");
    if (!echo) throw IoError("cannot write config_echo.json");
    echo << cfg_doc.dump(2) << '\n';
  }

  if (cfg.spectra.emit) {
    ensure_dir(cfg.output_dir + "/spectra");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (!results[i].stable) continue;
      const auto& t = tasks[i];
      BathModel bath = cfg.bath;
      bath.t_f_k = t.t_f_k;
      HeterodyneGrid grid;
      grid.beat_hz = cfg.spectra.beat_hz;
      grid.span_hz = cfg.spectra.span_hz;
      grid.points = cfg.spectra.points;
      Spectrum s = heterodyne_psd(cfg.device, {t.delta_hz, t.n_c}, bath,
                                  cfg.calibration, grid);
      if (cfg.noise.n_avg > 0)
        s = add_measurement_noise(s, seed * 1000003ULL + i, cfg.noise.n_avg);
      write_spectrum_csv(
          s, cfg.output_dir + "/spectra/spec_" + std::to_string(i) + ".csv");
    }
  }
  return 0;
}

}  // namespace omckit::cli

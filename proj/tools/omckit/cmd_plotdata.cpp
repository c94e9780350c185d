#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "commands.hpp"
#include "omckit/errors.hpp"

namespace omckit::cli {

namespace {

struct SeriesView {
  Table series;
  Table asymmetry;  // may be empty
  nlohmann::json config;
  std::string sweep_variable;

  std::size_t col(const std::string& name) const {
    const auto it =
        std::find(series.columns.begin(), series.columns.end(), name);
    if (it == series.columns.end())
      throw ValidationError("plotdata: series.csv missing column '" + name +
                            "'");
    return static_cast<std::size_t>(it - series.columns.begin());
  }
};

SeriesView load_bundle(const std::string& dir) {
  SeriesView v;
  try {
    v.series = read_table_csv(dir + "/series.csv");
  } catch (const IoError&) {
    throw ValidationError(
        "plotdata: missing series: '" + dir +
        "/series.csv' not found; run `omckit simulate` into this bundle "
        "first");
  }
  try {
    v.asymmetry = read_table_csv(dir + "/asymmetry.csv");
  } catch (const IoError&) {
    // optional
  }
  std::ifstream cfg(dir + "/config_echo.json");
  if (cfg) {
    v.config = nlohmann::json::parse(cfg, nullptr, true, true);
    if (v.config.contains("sweep"))
      v.sweep_variable = v.config["sweep"].value("variable", "");
  }
  return v;
}

// rows matching a detuning sign, stable only
std::vector<const std::vector<double>*> rows_with_sign(const SeriesView& v,
                                                       int sign) {
  const auto ci_sign = v.col("detuning_sign");
  const auto ci_stable = v.col("stable");
  std::vector<const std::vector<double>*> out;
  for (const auto& r : v.series.rows) {
    if (r[ci_stable] != 1.0) continue;
    if (static_cast<int>(r[ci_sign]) != sign) continue;
    out.push_back(&r);
  }
  return out;
}

Table slice(const SeriesView& v,
            const std::vector<const std::vector<double>*>& rows,
            const std::string& name,
            const std::vector<std::pair<std::string, std::string>>& columns) {
  Table t;
  t.name = name;
  std::vector<std::size_t> idx;
  for (const auto& [src, dst] : columns) {
    t.columns.push_back(dst);
    idx.push_back(v.col(src));
  }
  for (const auto* r : rows) {
    std::vector<double> row;
    for (std::size_t i : idx) row.push_back((*r)[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void require_sweep(const SeriesView& v, const std::string& var,
                   const std::string& figure) {
  if (v.sweep_variable != var)
    throw ValidationError("plotdata: " + figure + " needs a '" + var +
                          "' sweep bundle; run `omckit simulate` with "
                          "sweep.variable = \"" +
                          var + "\"");
}

std::vector<double> distinct_temps(const SeriesView& v) {
  const auto ci = v.col("t_f_k");
  std::set<long long> keys;
  std::vector<double> temps;
  for (const auto& r : v.series.rows) {
    const long long k = llround(r[ci] * 1e9);
    if (keys.insert(k).second) temps.push_back(r[ci]);
  }
  std::sort(temps.begin(), temps.end());
  return temps;
}

}  // namespace

int run_plotdata(const PlotdataArgs& args) {
  if (args.bundle_dir.empty())
    throw ValidationError("plotdata: --bundle <dir> is required");
  if (args.figure.empty())
    throw ValidationError("plotdata: --figure <id> is required");
  const SeriesView v = load_bundle(args.bundle_dir);
  const std::string out = args.out_dir.empty() ? args.bundle_dir + "/plotdata"
                                               : args.out_dir;
  const std::vector<std::string> formats =
      args.formats.empty() ? std::vector<std::string>{"csv"} : args.formats;

  ReportBundle bundle;
  const std::string& fig = args.figure;

  if (fig == "fig2a" || fig == "fig2b") {
    require_sweep(v, "n_c", fig);
    const auto red = rows_with_sign(v, +1);
    const auto blue = rows_with_sign(v, -1);
    if (red.empty() || blue.empty())
      throw ValidationError("plotdata: " + fig +
                            " needs red and blue probe series; simulate with "
                            "probes [\"red\",\"blue\"]");
    if (fig == "fig2a") {
      bundle.tables.push_back(slice(v, red, "fig2a_linewidth_red",
                                    {{"n_c", "n_c"},
                                     {"linewidth_hz", "linewidth_hz"},
                                     {"linewidth_err_hz", "linewidth_err_hz"},
                                     {"linewidth_model_hz", "model_hz"}}));
      bundle.tables.push_back(slice(v, blue, "fig2a_linewidth_blue",
                                    {{"n_c", "n_c"},
                                     {"linewidth_hz", "linewidth_hz"},
                                     {"linewidth_err_hz", "linewidth_err_hz"},
                                     {"linewidth_model_hz", "model_hz"}}));
      // gamma_om from the red/blue linewidth difference
      Table gom;
      gom.name = "fig2a_gamma_om";
      gom.columns = {"n_c", "gamma_om_hz", "gamma_om_err_hz", "model_hz"};
      const auto ci_nc = v.col("n_c");
      const auto ci_lw = v.col("linewidth_hz");
      const auto ci_le = v.col("linewidth_err_hz");
      const auto ci_gm = v.col("gamma_om_hz");
      for (const auto* r : red) {
        for (const auto* b : blue) {
          if (std::fabs((*b)[ci_nc] - (*r)[ci_nc]) > 1e-9 * (*r)[ci_nc])
            continue;
          const double diff = 0.5 * ((*r)[ci_lw] - (*b)[ci_lw]);
          const double err =
              0.5 * std::hypot((*r)[ci_le], (*b)[ci_le]);
          gom.rows.push_back({(*r)[ci_nc], diff, err, (*r)[ci_gm]});
          break;
        }
      }
      bundle.tables.push_back(std::move(gom));
    } else {
      bundle.tables.push_back(slice(v, red, "fig2b_occupancy_red",
                                    {{"n_c", "n_c"},
                                     {"occupancy", "occupancy"},
                                     {"occupancy_err", "occupancy_err"},
                                     {"occupancy_model", "model"}}));
      bundle.tables.push_back(slice(v, blue, "fig2b_occupancy_blue",
                                    {{"n_c", "n_c"},
                                     {"occupancy", "occupancy"},
                                     {"occupancy_err", "occupancy_err"},
                                     {"occupancy_model", "model"}}));
    }
  } else if (fig == "fig3b" || fig == "fig3c") {
    require_sweep(v, "delta", fig);
    std::vector<const std::vector<double>*> rows;
    const auto ci_stable = v.col("stable");
    for (const auto& r : v.series.rows)
      if (r[ci_stable] == 1.0) rows.push_back(&r);
    if (rows.empty())
      throw ValidationError("plotdata: " + fig + " found no stable rows");
    if (fig == "fig3b") {
      bundle.tables.push_back(slice(v, rows, "fig3b_area",
                                    {{"delta_hz", "delta_hz"},
                                     {"area_quanta", "area"},
                                     {"area_err", "area_err"}}));
    } else {
      bundle.tables.push_back(slice(v, rows, "fig3c_linewidth",
                                    {{"delta_hz", "delta_hz"},
                                     {"fwhm_hz", "fwhm_hz"},
                                     {"fwhm_err_hz", "fwhm_err_hz"},
                                     {"fwhm_model_hz", "model_hz"}}));
    }
  } else if (fig == "fig4a") {
    require_sweep(v, "n_c", fig);
    const auto res = rows_with_sign(v, 0);
    if (res.empty())
      throw ValidationError("plotdata: fig4a needs a resonant probe series; "
                            "simulate with probes including \"resonant\"");
    bundle.tables.push_back(slice(v, res, "fig4a_occupancy",
                                  {{"n_c", "n_c"},
                                   {"occupancy", "occupancy"},
                                   {"occupancy_err", "occupancy_err"},
                                   {"occupancy_model", "model"},
                                   {"t_p_k", "t_p_k"}}));
  } else if (fig == "fig4b") {
    require_sweep(v, "n_c", fig);
    const auto res = rows_with_sign(v, 0);
    const auto red = rows_with_sign(v, +1);
    if (res.empty() || red.empty())
      throw ValidationError("plotdata: fig4b needs resonant and red series");
    bundle.tables.push_back(slice(v, res, "fig4b_linewidth_resonant",
                                  {{"n_c", "n_c"},
                                   {"fwhm_hz", "fwhm_hz"},
                                   {"fwhm_err_hz", "fwhm_err_hz"}}));
    bundle.tables.push_back(slice(v, red, "fig4b_linewidth_red",
                                  {{"n_c", "n_c"},
                                   {"fwhm_hz", "fwhm_hz"},
                                   {"fwhm_err_hz", "fwhm_err_hz"}}));
    Table decomp;
    decomp.name = "fig4b_gamma_decomposition";
    decomp.columns = {"n_c", "gamma_p_hz", "gamma_i_hz"};
    const auto ci_nc = v.col("n_c");
    const auto ci_gp = v.col("gamma_p_hz");
    const auto ci_gm = v.col("gamma_om_hz");
    const auto ci_lw = v.col("linewidth_model_hz");
    for (const auto* r : res)
      decomp.rows.push_back(
          {(*r)[ci_nc], (*r)[ci_gp], (*r)[ci_lw] - (*r)[ci_gm]});
    bundle.tables.push_back(std::move(decomp));
  } else if (fig == "fig4e") {
    require_sweep(v, "n_c", fig);
    const auto temps = distinct_temps(v);
    if (temps.size() < 2)
      throw ValidationError(
          "plotdata: fig4e needs a two-temperature bundle; simulate with "
          "fridge_temperatures_k = [T1, T2]");
    const auto ci_tf = v.col("t_f_k");
    int index = 0;
    for (double tf : temps) {
      std::vector<const std::vector<double>*> rows;
      for (const auto* r : rows_with_sign(v, +1))
        if (std::fabs((*r)[ci_tf] - tf) < 1e-12 + 1e-9 * tf) rows.push_back(r);
      if (rows.empty()) continue;
      ++index;
      bundle.tables.push_back(
          slice(v, rows, "fig4e_data_" + std::to_string(index),
                {{"n_c", "n_c"},
                 {"occupancy", "occupancy"},
                 {"occupancy_err", "occupancy_err"},
                 {"t_f_k", "t_f_k"}}));
      bundle.tables.push_back(
          slice(v, rows, "fig4e_model_" + std::to_string(index),
                {{"n_c", "n_c"},
                 {"occupancy_model", "occupancy"},
                 {"t_f_k", "t_f_k"}}));
    }
    if (index < 2)
      throw ValidationError(
          "plotdata: fig4e needs red-detuned data at two temperatures");
  } else if (fig == "figS5b") {
    require_sweep(v, "n_c", fig);
    const auto res = rows_with_sign(v, 0);
    if (res.empty())
      throw ValidationError("plotdata: figS5b needs a resonant probe series");
    bundle.tables.push_back(slice(v, res, "figS5b_linewidth",
                                  {{"t_p_k", "t_p_k"},
                                   {"fwhm_hz", "fwhm_hz"},
                                   {"fwhm_err_hz", "fwhm_err_hz"},
                                   {"gamma_g_hz", "gamma_g_hz"}}));
    bundle.tables.push_back(slice(v, res, "figS5b_gamma_p",
                                  {{"t_p_k", "t_p_k"},
                                   {"gamma_p_hz", "gamma_p_hz"}}));
  } else {
    throw ValidationError("plotdata: unknown figure '" + fig +
                          "'; expected fig2a, fig2b, fig3b, fig3c, fig4a, "
                          "fig4b, fig4e, or figS5b");
  }

  bundle.provenance = make_provenance(v.config.is_null()
                                          ? nlohmann::json::object()
                                          : v.config);
  bundle.provenance["command"] = "plotdata";
  bundle.provenance["figure"] = fig;
  write_bundle(bundle, out, formats);
  return 0;
}

}  // namespace omckit::cli

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "omckit/spectrum.hpp"

TEST_SUITE_BEGIN("cli");

namespace {

namespace fs = std::filesystem;

std::string work_dir() {
  static const std::string dir = [] {
    const std::string d =
        (fs::temp_directory_path() / "omckit_cli_tests").string();
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& tag) {
  const std::string out = work_dir() + "/" + tag + ".out";
  const std::string err = work_dir() + "/" + tag + ".err";
  const std::string cmd =
      std::string(OMCKIT_BIN) + " " + args + " > " + out + " 2> " + err;
  const int status = std::system(cmd.c_str());
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

// reference-device config with the activated-bath truth
std::string base_config(const std::string& extra) {
  return std::string(R"({
  "device": {"g0_hz": 735e3, "kappa_hz": 529e6, "kappa_e_hz": 153e6,
             "kappa_i_hz": 376e6, "omega_m_hz": 3.6e9, "lambda_c_m": 1545e-9},
  "bath": {"gamma_0_hz": 306.0, "t_f_k": 0.010,
           "np_amplitude": 13.300924322380075, "np_exponent": 0.25,
           "gamma_p_law": {"type": "activated",
                           "amplitude_hz_per_k": 789.9384724397804,
                           "t_c_k": 2.0}},
  "calibration": {"eta_12": 0.88, "eta_23": 0.84, "eta_cpl": 0.34,
                  "eta_vc": 0.8, "eta_det": 0.7, "beta": 1.0},
)") + extra + "\n}";
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(bool(in), ("missing file " + path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t col_of(const std::vector<std::vector<std::string>>& rows,
                   const std::string& name) {
  for (std::size_t i = 0; i < rows[0].size(); ++i)
    if (rows[0][i] == name) return i;
  FAIL(("missing column " + name));
  return 0;
}

}  // namespace

TEST_CASE("simulate bundle: determinism, workers, csv round-trip") {
  const std::string cfg = work_dir() + "/sim.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.01, 100.0],
            "points": 12},
  "fridge_temperatures_k": [0.010, 0.635],
  "probes": ["red", "blue", "resonant"],
  "noise": {"seed": 7, "n_avg": 100})"));

  const std::string out1 = work_dir() + "/sim_out1";
  const std::string out2 = work_dir() + "/sim_out2";
  CHECK(run("simulate --config " + cfg + " --out " + out1, "sim1") == 0);
  CHECK(run("simulate --config " + cfg + " --out " + out2 + " --workers 4",
            "sim2") == 0);
  CHECK(fs::exists(out1 + "/series.csv"));
  CHECK(fs::exists(out1 + "/asymmetry.csv"));
  CHECK(fs::exists(out1 + "/report.json"));
  // identical config and seed reproduce byte-identical tables, regardless of
  // worker count
  CHECK(slurp(out1 + "/series.csv") == slurp(out2 + "/series.csv"));
  CHECK(slurp(out1 + "/asymmetry.csv") == slurp(out2 + "/asymmetry.csv"));

  // different seed changes the noisy columns
  const std::string out3 = work_dir() + "/sim_out3";
  CHECK(run("simulate --config " + cfg + " --out " + out3 + " --seed 8",
            "sim3") == 0);
  CHECK(slurp(out1 + "/series.csv") != slurp(out3 + "/series.csv"));

  // emitted tables re-parse: header plus finite numeric cells
  const auto rows = read_csv(out1 + "/series.csv");
  REQUIRE(rows.size() > 10);
  const std::size_t ncols = rows[0].size();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == ncols);
    for (const auto& cell : rows[i]) {
      if (cell.empty()) continue;  // NaN slot (unstable point)
      char* end = nullptr;
      std::strtod(cell.c_str(), &end);
      CHECK(*end == '\0');
    }
  }
}

TEST_CASE("zero-noise reruns are byte-identical with matching provenance") {
  const std::string cfg = work_dir() + "/nonoise.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.1, 10.0],
            "points": 8},
  "probes": ["red", "resonant"],
  "noise": {"seed": 0, "n_avg": 0})"));
  const std::string a = work_dir() + "/nn_a";
  const std::string b = work_dir() + "/nn_b";
  CHECK(run("simulate --config " + cfg + " --out " + a, "nn_a") == 0);
  CHECK(run("simulate --config " + cfg + " --out " + b, "nn_b") == 0);
  CHECK(slurp(a + "/series.csv") == slurp(b + "/series.csv"));
  CHECK(!slurp(a + "/series.csv").empty());

  // identical config -> identical provenance hash; reports differ only in
  // the timestamp field
  const auto hash_of = [&](const std::string& dir) {
    const std::string rep = slurp(dir + "/report.json");
    const auto pos = rep.find("config_hash");
    REQUIRE(pos != std::string::npos);
    return rep.substr(pos, 32);
  };
  CHECK(hash_of(a) == hash_of(b));
}

TEST_CASE("simulate validation failures exit with code 2") {
  const std::string cfg = work_dir() + "/bad_points.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.01, 100.0],
            "points": 1})"));
  CHECK(run("simulate --config " + cfg, "badpoints") == 2);

  const std::string cfg2 = work_dir() + "/bad_field.json";
  spit(cfg2, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.01, 100.0],
            "points": 5},
  "probes": ["sideways"])"));
  const int rc = run("simulate --config " + cfg2, "badfield");
  CHECK(rc == 2);
  const std::string err = slurp(work_dir() + "/badfield.err");
  CHECK(err.find("sideways") != std::string::npos);
}

TEST_CASE("missing config file is an I/O error (exit 3)") {
  CHECK(run("simulate --config " + work_dir() + "/nope.json", "noconfig") ==
        3);
}

TEST_CASE("simulate then lorentzian fit on an emitted spectrum") {
  const std::string cfg = work_dir() + "/spec.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [5.0, 50.0],
            "points": 2},
  "probes": ["red"],
  "calibration": {"beta": 1.0},
  "spectra": {"emit": true, "points": 512},
  "noise": {"seed": 3, "n_avg": 0})"));
  const std::string out = work_dir() + "/spec_out";
  CHECK(run("simulate --config " + cfg + " --out " + out, "specsim") == 0);
  REQUIRE(fs::exists(out + "/spectra/spec_0.csv"));

  const std::string fout = work_dir() + "/spec_fit";
  CHECK(run("fit --mode lorentzian --input " + out + "/spectra/spec_0.csv" +
                " --out " + fout,
            "specfit") == 0);
  const auto doc = slurp(fout + "/fit_spec_0.json");
  CHECK(doc.find("\"converged\": true") != std::string::npos);
  CHECK(fs::exists(fout + "/overlay_spec_0.csv"));
  CHECK(fs::exists(fout + "/report.json"));

  // concurrent multi-file fit emits one result per input, in order
  REQUIRE(fs::exists(out + "/spectra/spec_1.csv"));
  const std::string fout2 = work_dir() + "/spec_fit_multi";
  CHECK(run("fit --mode lorentzian --workers 2 --input " + out +
                "/spectra/spec_0.csv " + out + "/spectra/spec_1.csv --out " +
                fout2,
            "specfit2") == 0);
  CHECK(fs::exists(fout2 + "/fit_spec_0.json"));
  CHECK(fs::exists(fout2 + "/fit_spec_1.json"));
}

TEST_CASE("malformed fit input names the offending row, exit 2") {
  const std::string csv = work_dir() + "/bad_rows.csv";
  spit(csv, "x,y\n1.0,2.0\n3.0\n");
  const int rc = run("fit --mode power-law --input " + csv, "badrow");
  CHECK(rc == 2);
  const std::string err = slurp(work_dir() + "/badrow.err");
  CHECK(err.find(":3:") != std::string::npos);
  // missing input file altogether -> I/O error
  CHECK(run("fit --mode power-law --input " + work_dir() + "/absent.csv",
            "absent") == 3);
}

TEST_CASE("power-law fit through files") {
  const std::string csv = work_dir() + "/pl.csv";
  std::ostringstream body;
  body << "x,y\n";
  for (int i = 0; i < 30; ++i) {
    const double x = 0.01 * std::pow(10.0, i / 10.0);
    body << x << ',' << 3.0 * std::pow(x, 0.25) << '\n';
  }
  spit(csv, body.str());
  const std::string out = work_dir() + "/pl_out";
  CHECK(run("fit --mode power-law --input " + csv + " --out " + out, "pl") ==
        0);
  const std::string doc = slurp(out + "/fit_power_law.json");
  CHECK(doc.find("exponent") != std::string::npos);
  CHECK(doc.find("0.25") != std::string::npos);
}

TEST_CASE("bath-model fit from a single temperature reports the warning") {
  const std::string cfg = work_dir() + "/bath.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.01, 100.0],
            "points": 14},
  "probes": ["red"],
  "noise": {"seed": 11, "n_avg": 200})"));
  const std::string sim_out = work_dir() + "/bath_sim";
  CHECK(run("simulate --config " + cfg + " --out " + sim_out, "bathsim") == 0);

  const std::string fit_out = work_dir() + "/bath_fit";
  CHECK(run("fit --mode bath-model --config " + cfg + " --input " + sim_out +
                "/series.csv --out " + fit_out,
            "bathfit") == 0);
  const std::string doc = slurp(fit_out + "/fit_bath_model.json");
  CHECK(doc.find("single fridge temperature") != std::string::npos);
  CHECK(fs::exists(fit_out + "/gamma_p_table.csv"));
}

TEST_CASE("simulate then g0 fit from the linewidth difference") {
  // sweep below the self-oscillation threshold so both detunings are stable
  const std::string cfg = work_dir() + "/g0.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.005, 0.08],
            "points": 12},
  "probes": ["red", "blue"],
  "noise": {"seed": 13, "n_avg": 2000})"));
  const std::string sim_out = work_dir() + "/g0_sim";
  CHECK(run("simulate --config " + cfg + " --out " + sim_out, "g0sim") == 0);
  const std::string fit_out = work_dir() + "/g0_fit";
  CHECK(run("fit --mode g0 --config " + cfg + " --input " + sim_out +
                "/series.csv --out " + fit_out,
            "g0fit") == 0);
  const std::string doc = slurp(fit_out + "/fit_g0.json");
  const auto pos = doc.find("\"g0_hz\": ");
  REQUIRE(pos != std::string::npos);
  const double g0 = std::strtod(doc.c_str() + pos + 9, nullptr);
  CHECK(g0 == doctest::Approx(735e3).epsilon(0.05));
}

TEST_CASE("phonon table asymptote columns") {
  const std::string cfg = work_dir() + "/phonon.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "T_p", "scale": "log", "range": [0.05, 400.0],
            "points": 24},
  "continuum": {"exponent_a": 3.0, "cutoff_t_c_k": 2.0, "prefactor_hz": 1.0})"));
  const std::string out = work_dir() + "/phonon_out";
  CHECK(run("phonon --config " + cfg + " --out " + out, "phonon") == 0);
  const auto rows = read_csv(out + "/phonon.csv");
  REQUIRE(rows.size() == 25);
  CHECK(rows[0] == std::vector<std::string>{
                       "t_p_k", "x_c", "mixing_integral", "gamma_p_hz",
                       "gamma_low_hz", "gamma_high_hz", "ratio_low",
                       "ratio_high"});
  const auto lo_ratio = std::stod(rows[1][6]);       // coldest row
  const auto hi_ratio = std::stod(rows.back()[7]);   // hottest row
  CHECK(lo_ratio == doctest::Approx(1.0).epsilon(0.1));
  CHECK(hi_ratio == doctest::Approx(1.0).epsilon(0.01));
  // hottest row integral approaches a Gamma(a) zeta(a)
  const double integral = std::stod(rows.back()[2]);
  CHECK(integral == doctest::Approx(7.2123414).epsilon(1e-3));

  // empty/invalid grid
  const std::string bad = work_dir() + "/phonon_bad.json";
  spit(bad, base_config(R"(
  "sweep": {"variable": "T_p", "scale": "log", "range": [0.05, 400.0],
            "points": 0})"));
  CHECK(run("phonon --config " + bad, "phonon_bad") == 2);
}

TEST_CASE("plotdata fig4e emits two data and two model tables") {
  const std::string cfg = work_dir() + "/fig4e.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.01, 100.0],
            "points": 10},
  "fridge_temperatures_k": [0.010, 0.635],
  "probes": ["red", "blue", "resonant"],
  "noise": {"seed": 5, "n_avg": 100})"));
  const std::string bundle = work_dir() + "/fig4e_bundle";
  CHECK(run("simulate --config " + cfg + " --out " + bundle, "fig4e_sim") ==
        0);
  const std::string out = work_dir() + "/fig4e_plot";
  CHECK(run("plotdata --bundle " + bundle + " --figure fig4e --out " + out,
            "fig4e") == 0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".csv" &&
        e.path().filename().string().rfind("fig4e_", 0) == 0)
      ++csvs;
  CHECK(csvs == 4);

  // svg format flag produces svg files too
  const std::string out_svg = work_dir() + "/fig4e_svg";
  CHECK(run("plotdata --bundle " + bundle + " --figure fig4a --out " +
                out_svg + " --format csv,svg",
            "fig4a_svg") == 0);
  CHECK(fs::exists(out_svg + "/fig4a_occupancy.csv"));
  CHECK(fs::exists(out_svg + "/fig4a_occupancy.svg"));
  // documented column schema, exactly
  const auto fig4a = read_csv(out_svg + "/fig4a_occupancy.csv");
  CHECK(fig4a[0] == std::vector<std::string>{"n_c", "occupancy",
                                             "occupancy_err", "model",
                                             "t_p_k"});
  const auto fig4e_data = read_csv(out + "/fig4e_data_1.csv");
  CHECK(fig4e_data[0] == std::vector<std::string>{"n_c", "occupancy",
                                                  "occupancy_err", "t_f_k"});

  // figure needing a delta sweep on an n_c bundle: named guidance, exit 2
  const int rc = run("plotdata --bundle " + bundle + " --figure fig3b",
                     "fig3b_wrong");
  CHECK(rc == 2);
  const std::string err = slurp(work_dir() + "/fig3b_wrong.err");
  CHECK(err.find("delta") != std::string::npos);
  CHECK(err.find("simulate") != std::string::npos);
}

TEST_CASE("delta sweep feeds the detuning and jitter-series fits") {
  const std::string cfg = work_dir() + "/delta.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "delta", "scale": "linear",
            "range": [-2.88e9, 7.2e9], "points": 25},
  "probe_n_c": 2.2,
  "bath": {"gamma_0_hz": 306.0, "t_f_k": 0.185,
           "np_amplitude": 13.300924322380075, "np_exponent": 0.25,
           "gamma_p_law": {"type": "activated",
                           "amplitude_hz_per_k": 789.9384724397804,
                           "t_c_k": 2.0},
           "jitter_law": {"amplitude_hz": 5.0e3, "exponent": -0.9}},
  "noise": {"seed": 9, "n_avg": 400})"));
  const std::string bundle = work_dir() + "/delta_bundle";
  CHECK(run("simulate --config " + cfg + " --out " + bundle, "deltasim") == 0);

  const std::string fit_out = work_dir() + "/delta_fit";
  CHECK(run("fit --mode detuning --config " + cfg + " --input " + bundle +
                "/series.csv --n-c 2.2 --out " + fit_out,
            "deltafit") == 0);
  CHECK(slurp(fit_out + "/fit_detuning.json").find("cooperativity") !=
        std::string::npos);

  // plotdata on the delta bundle
  CHECK(run("plotdata --bundle " + bundle + " --figure fig3c --out " +
                work_dir() + "/fig3c",
            "fig3c") == 0);
  CHECK(fs::exists(work_dir() + "/fig3c/fig3c_linewidth.csv"));
}

TEST_CASE("fridge-temperature sweep tracks the thermal occupancy") {
  const std::string cfg = work_dir() + "/tf.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "T_f", "scale": "log", "range": [0.05, 4.0],
            "points": 7},
  "probes": ["red"],
  "probe_n_c": 1e-6,
  "noise": {"seed": 0, "n_avg": 0})"));
  const std::string out = work_dir() + "/tf_out";
  CHECK(run("simulate --config " + cfg + " --out " + out, "tf") == 0);
  const auto rows = read_csv(out + "/series.csv");
  const std::size_t ci_tf = col_of(rows, "t_f_k");
  const std::size_t ci_occ = col_of(rows, "occupancy_model");
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double occ = std::stod(rows[i][ci_occ]);
    CHECK(occ > prev);  // hotter fridge, higher occupancy
    prev = occ;
    // at negligible probe power the mode thermalizes to the fridge
    const double tf = std::stod(rows[i][ci_tf]);
    const double x = 6.62607015e-34 * 3.6e9 / (1.380649e-23 * tf);
    const double n_f = 1.0 / std::expm1(x);
    CHECK(occ == doctest::Approx(n_f).epsilon(1e-3));
  }
}

TEST_CASE("heating-cooling-heating shape with the tabulated kink law") {
  const std::string cfg = work_dir() + "/kink.json";
  spit(cfg, base_config(R"(
  "sweep": {"variable": "n_c", "scale": "log", "range": [0.02, 150.0],
            "points": 25},
  "probes": ["red"],
  "bath": {"gamma_0_hz": 306.0, "t_f_k": 0.010,
           "np_amplitude": 13.300924322380075, "np_exponent": 0.25,
           "gamma_p_law": {"type": "tabulated",
             "t_p_k":     [0.2,     0.3,    0.5,   0.8,   1.2,    1.8,
                            2.5,    3.0,    4.0,   5.5,   7.5,    10.0, 14.0],
             "gamma_p_hz": [0.00717, 0.3014, 7.234, 51.87, 179.04, 468.1,
                            887.4,  1216.7, 3330.2, 10152, 30076, 82270,
                            267170]}},
  "noise": {"seed": 1, "n_avg": 0})"));
  const std::string out = work_dir() + "/kink_out";
  CHECK(run("simulate --config " + cfg + " --out " + out, "kink") == 0);
  const auto rows = read_csv(out + "/series.csv");
  const std::size_t ci_occ = col_of(rows, "occupancy_model");
  const std::size_t ci_nc = col_of(rows, "n_c");
  std::vector<std::pair<double, double>> occ;
  for (std::size_t i = 1; i < rows.size(); ++i)
    occ.emplace_back(std::stod(rows[i][ci_nc]), std::stod(rows[i][ci_occ]));
  std::sort(occ.begin(), occ.end());
  const auto at = [&](double n_c) {
    double best = 1e300, val = 0.0;
    for (const auto& [nc, o] : occ)
      if (std::fabs(std::log(nc / n_c)) < best) {
        best = std::fabs(std::log(nc / n_c));
        val = o;
      }
    return val;
  };
  // heating at low n_c, back-action cooling through the middle, absorption
  // heating again at the top (kink regime)
  CHECK(at(0.3) > 1.2 * at(0.02));
  CHECK(at(3.0) < 0.9 * at(0.3));
  CHECK(at(120.0) > 1.2 * at(3.0));
}

TEST_SUITE_END();

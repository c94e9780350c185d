#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "omckit/errors.hpp"
#include "version.hpp"

namespace {

void add_common(CLI::App* cmd, omckit::cli::CommonArgs& args,
                bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path,
                              "run configuration JSON");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory override");
  cmd->add_option("--seed", args.seed, "random seed override")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--workers", args.workers, "worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", args.formats,
                  "output formats (csv and/or svg)")
      ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cryogenic optomechanics thermometry toolkit"};
  app.set_version_flag("--version", omckit::cli::kVersion);
  app.require_subcommand(1);

  omckit::cli::CommonArgs sim_args;
  auto* sim = app.add_subcommand("simulate",
                                 "synthesize spectra and derived series");
  add_common(sim, sim_args, true);

  omckit::cli::FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit spectra or series");
  add_common(fit, fit_args, false);
  fit->add_option("--mode", fit_args.mode,
                  "lorentzian|voigt|detuning|power-law|bath-model|g0")
      ->required();
  fit->add_option("--input", fit_args.inputs, "input files")->required();
  fit->add_option("--constraint-c", fit_args.constraint_c,
                  "fix the cooperativity (voigt detuning-series mode)");
  fit->add_option("--n-c", fit_args.fixed_n_c, "probe photon number");
  fit->add_flag("--per-point", fit_args.per_point,
                "bath-model: per-point gamma_p instead of spline knots");

  omckit::cli::CommonArgs ph_args;
  auto* ph = app.add_subcommand("phonon",
                                "tabulate three-phonon damping integrals");
  add_common(ph, ph_args, true);

  omckit::cli::PlotdataArgs plot_args;
  auto* plot = app.add_subcommand("plotdata",
                                  "emit per-figure curve tables");
  add_common(plot, plot_args, false);
  plot->add_option("--bundle", plot_args.bundle_dir, "simulate bundle dir")
      ->required();
  plot->add_option("--figure", plot_args.figure,
                   "fig2a|fig2b|fig3b|fig3c|fig4a|fig4b|fig4e|figS5b")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return omckit::cli::run_simulate(sim_args);
    if (fit->parsed()) return omckit::cli::run_fit(fit_args);
    if (ph->parsed()) return omckit::cli::run_phonon(ph_args);
    if (plot->parsed()) return omckit::cli::run_plotdata(plot_args);
  } catch (const omckit::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const omckit::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const omckit::InsufficientDataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const omckit::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

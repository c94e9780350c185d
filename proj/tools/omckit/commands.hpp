#pragma once

#include <string>

#include "config.hpp"
#include "report.hpp"

namespace omckit::cli {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;        // overrides config outputs.dir when set
  std::uint64_t seed = 0;     // overrides config noise.seed when set
  bool seed_set = false;
  int workers = 1;
  std::vector<std::string> formats;  // overrides config formats when set
};

int run_simulate(const CommonArgs& args);

struct FitArgs : CommonArgs {
  std::string mode;  // lorentzian|voigt|detuning|power-law|bath-model|g0
  std::vector<std::string> inputs;
  double constraint_c = -1.0;     // voigt/detuning series constraint
  double fixed_n_c = 0.0;
  bool per_point = false;
};
int run_fit(const FitArgs& args);

int run_phonon(const CommonArgs& args);

struct PlotdataArgs : CommonArgs {
  std::string bundle_dir;
  std::string figure;
};
int run_plotdata(const PlotdataArgs& args);

}  // namespace omckit::cli

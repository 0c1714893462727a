#pragma once

#include <optional>
#include <string>

#include "gbmcal/constants.hpp"

namespace gbmcal {

// Effective run configuration; flags override config-file entries which
// override the preset defaults.
struct RunConfig {
  // input files
  std::string constants_path;
  std::string data_path;
  std::string u0_path;
  std::optional<std::string> v0_path;
  std::string synth_path;
  std::string chain_path;
  std::string out_dir = "out";

  std::string mode = "bi";
  bool mode_explicit = false;  // --mode given on the command line
  std::string preset = "desk";  // desk | paper
  uint64_t seed = 0;
  int threads = 0;  // 0 = all cores

  // forward model
  int n_nodes = 0;  // 0 = preset default
  double rtol = 1e-6;
  double atol = 1e-9;
  int n_out = 100;
  std::optional<CalibrationParameters> theta;  // simulate only; defaults to reference
  CalibrationParameters reference = default_reference_theta();

  // sampler
  int n_walkers = 0;  // 0 = preset default
  int n_samples = 0;
  double burn_in = 0.2;
  double stretch_a = 2.0;
  int thin = 1;
  bool chain_csv = false;
  std::string resume_path;  // continue a saved chain

  // design
  int pool = 500;
  int keep = 200;
  int n_lhs = 28;
  double box_lo = 0.1;
  double box_hi = 6.0;

  // analysis
  int n_draws = 1000;
  int n_band_points = 201;

  void apply_preset();  // fills zeroed sampler/grid settings from mode + preset
};

// merge key=value config file entries into cfg (only keys not already set on
// the command line; the caller passes which keys the CLI set)
void apply_config_file(RunConfig& cfg, const std::string& path,
                       const std::string& cli_set_keys);

int cmd_simulate(RunConfig cfg);
int cmd_design(RunConfig cfg);
int cmd_calibrate(RunConfig cfg);
int cmd_analyze(RunConfig cfg);
int cmd_predict(RunConfig cfg);

}  // namespace gbmcal

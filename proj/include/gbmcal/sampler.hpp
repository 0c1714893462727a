#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbmcal/mode.hpp"
#include "gbmcal/priors.hpp"
#include "gbmcal/rng.hpp"

namespace gbmcal {

using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;

struct ChainMeta {
  std::string mode = "bi";
  uint64_t seed = 0;
  double burn_in = 0.2;
  double stretch_a = 2.0;
  long n_steps_total = 0;  // including burn-in
  std::vector<std::string> param_names;
  std::vector<std::string> param_kinds;
  nlohmann::json extra;  // reference theta, standardization constants, box, ...

  std::vector<ParamSpec> specs() const;
  CalibrationParameters reference() const;
};

// Retained ensemble output: samples are sampler coordinates (multipliers and
// log scales); conversions to natural units go through the meta block.
struct Chain {
  int n_steps = 0;  // retained
  int n_walkers = 0;
  int n_params = 0;
  std::vector<double> samples;   // [step][walker][param]
  std::vector<double> log_post;  // [step][walker]
  Eigen::VectorXd acceptance;    // per-walker fraction over the whole run
  ChainMeta meta;

  double sample(int s, int w, int p) const {
    return samples[(static_cast<size_t>(s) * n_walkers + w) * n_params + p];
  }
  Eigen::VectorXd walker_at(int s, int w) const;
  double logp(int s, int w) const { return log_post[static_cast<size_t>(s) * n_walkers + w]; }
  long n_retained_samples() const { return static_cast<long>(n_steps) * n_walkers; }

  void save(const std::string& path) const;
  static Chain load(const std::string& path);
  void export_csv(const std::string& path) const;  // natural units

  // keep every k-th retained step
  Chain thinned(int k) const;
  // splice a continuation run onto this chain (same walkers and parameters)
  void append(const Chain& next);
};

class SamplerStuckError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct StretchProposal {
  Eigen::VectorXd y;
  double log_hastings;  // (n_params - 1) * log g
};

// g drawn with density proportional to 1/sqrt(g) on [1/a, a]
StretchProposal stretch_move(const Eigen::VectorXd& walker, const Eigen::VectorXd& partner,
                             double a, Rng& rng);

// prior draws (theta uniform in the box, scales from their Gammas) filtered
// to finite log posterior; gives up after 100 * n_walkers attempts
Eigen::MatrixXd init_walkers(const PriorSet& priors, const std::vector<ParamSpec>& specs,
                             const LogDensityFn& log_post, int n_walkers, uint64_t seed);

struct EnsembleOptions {
  int n_steps = 1000;
  double burn_in = 0.2;
  double stretch_a = 2.0;
  uint64_t seed = 0;
  int n_threads = 0;       // 0 = OpenMP default; 1 = serial reference path
  long rng_skip_steps = 0; // fast-forward walker streams (resume support)
  std::function<void(int, double)> progress;  // (step, acceptance so far)
};

// Affine-invariant stretch-move ensemble with alternating half updates.
// Walkers in the active half propose concurrently against the frozen half;
// per-walker RNG streams make the result independent of thread count.
Chain run_ensemble(const LogDensityFn& log_post, const Eigen::MatrixXd& init,
                   const EnsembleOptions& opts);

// natural-units view of one packed sample
Eigen::VectorXd chain_natural_row(const Chain& chain, int step, int walker);

}  // namespace gbmcal

#pragma once

#include <Eigen/Dense>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "gbmcal/design.hpp"
#include "gbmcal/mode.hpp"
#include "gbmcal/rng.hpp"

namespace gbmcal {

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
  double logpdf(double x) const;
  double sample(Rng& rng) const { return rng.gamma(shape, rate); }
  double mean() const { return shape / rate; }
};

// Priors for one calibration mode: uniform box over the theta multipliers,
// Gamma priors for every positive scale parameter (GP hypers and sigma).
struct PriorSet {
  CalibrationMode mode = CalibrationMode::BI;
  DesignBox box;
  std::map<std::string, GammaPrior> scales;  // keyed by parameter name

  const GammaPrior& scale(const std::string& name) const;
  nlohmann::json to_json() const;
  static PriorSet from_json(const nlohmann::json& j);
};

// Data moments driving the default prior construction.
struct DataMoments {
  Eigen::VectorXd x_nd;   // nondimensional data coordinates
  Eigen::VectorXd z_nd;   // z / c_sat
  double std_mean = 0.0;  // standardization constants derived from z_nd
  double std_sd = 1.0;
  Eigen::VectorXd z_std;
};

DataMoments compute_data_moments(const Eigen::VectorXd& x_nd, const Eigen::VectorXd& z_nd);

// Gamma(5, 5/d) for lengthscales with d the mean pairwise input distance,
// Gamma(5, 5/s) for signal variances with s the sd of the standardized
// responses, and a tight Gamma around 0.1 * mean|z| for sigma.
PriorSet default_priors(const DataMoments& data, const SyntheticDataset* synth,
                        CalibrationMode mode, const DesignBox& box);

// Sum of independent log densities over the natural-parameter vector
// (multipliers then scales, in mode packing order). -inf outside the box or
// at nonpositive scales.
double log_prior(const Eigen::VectorXd& natural_params, const PriorSet& priors);

}  // namespace gbmcal

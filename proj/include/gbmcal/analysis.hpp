#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gbmcal/calibration.hpp"
#include "gbmcal/grid.hpp"
#include "gbmcal/pde.hpp"
#include "gbmcal/sampler.hpp"

namespace gbmcal {

struct ParamSummary {
  std::string name;
  double map = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

struct PosteriorSummary {
  std::vector<ParamSummary> params;  // natural units
  Eigen::MatrixXd correlation;       // over natural values
  Eigen::VectorXd rhat;              // split-Rhat per parameter
  int map_step = 0;
  int map_walker = 0;
  double map_log_post = 0.0;
  Eigen::VectorXd map_packed;  // sampler coordinates of the MAP sample
};

// scaled L2 distance between profiles, dimensionless:
// e = (1/c_sat) * sqrt( integral (u_pred - u_exp)^2 dx/L ) over the data support
double profile_error(const CellProfile& pred, const CellProfile& exp, double c_sat, double L);

PosteriorSummary summarize(const Chain& chain);

struct PredictiveBand {
  Eigen::VectorXd x;     // [cm]
  Eigen::VectorXd mean;  // [cell/cm]
  Eigen::VectorXd sd;
  Eigen::VectorXd lo;  // mean - 2 sd
  Eigen::VectorXd hi;  // mean + 2 sd
};

// Monte-Carlo posterior predictive for the model-based modes (BI, BCD):
// draws (theta_i, sigma_i) without replacement, adds one noise draw per
// profile, reports the pointwise mean of the model profiles and the sample
// sd including the noise.
PredictiveBand predictive_band(const Chain& chain, const ForwardModel& model,
                               const Eigen::VectorXd& x_query_nd, int n_draws, uint64_t seed,
                               int n_threads = 0);

struct DiscrepancyCurve {
  Eigen::VectorXd x;     // nondimensional query coordinates
  Eigen::VectorXd mean;  // delta(x) in z_nd units (same scale as u/c_sat)
  Eigen::VectorXd sd;
};

// Conditions the discrepancy GP at the MAP (theta, beta_d, lambda_d, sigma)
// on the residuals z - eta(X; theta_MAP).
DiscrepancyCurve reconstruct_discrepancy(const Chain& chain, const DataMoments& data,
                                         const ForwardModel& model,
                                         const Eigen::VectorXd& x_query_nd);

// d(x_i) = z_i - eta(x_i; theta_hat), nondimensional
Eigen::VectorXd deviation(const DataMoments& data, const Eigen::Vector4d& theta_mult_hat,
                          const ForwardModel& model);

// Fisher front speed with the growth rate read as 1/tau_n
double fisher_wave_speed(double D_n, double tau_n);

// 50-bin marginal and 50x50 pairwise histogram CSV bundle for corner plots
void corner_export(const Chain& chain, const std::string& out_dir);

// split-Rhat over the natural per-walker sequences
Eigen::VectorXd compute_rhat(const Chain& chain);

struct SurrogateCurve {
  Eigen::VectorXd x_nd;
  Eigen::VectorXd mean_nd;  // u/c_sat units
  Eigen::VectorXd sd_nd;
};

// Surrogate predictor at the MAP hyperparameters: the GP conditioned on the
// experimental and synthetic rows exactly as in the mode's likelihood,
// evaluated at (x_query, theta_MAP).
SurrogateCurve surrogate_predict(const Chain& chain, const DataMoments& data,
                                 const SyntheticDataset& synth, const Eigen::VectorXd& xq_nd);

}  // namespace gbmcal

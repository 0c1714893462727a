#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gbmcal/design.hpp"
#include "gbmcal/gp.hpp"
#include "gbmcal/mode.hpp"
#include "gbmcal/priors.hpp"

namespace gbmcal {

// Evaluates eta (nondimensional) at the data coordinates for one multiplier
// vector; throws on solver failure.
using EtaFn = std::function<Eigen::VectorXd(const Eigen::Vector4d&)>;

// ---- likelihood cores (explicit inputs on one common scale) ----

// sum_i log N(z_i | eta_i, sigma^2)
double loglik_bi(const Eigen::VectorXd& z, const Eigen::VectorXd& eta, double sigma);

// log N(z | eta, K_d(x, x) + sigma^2 I); -inf on factorization failure
double loglik_bcd(const Eigen::VectorXd& z, const Eigen::VectorXd& eta,
                  const Eigen::VectorXd& x_nd, const DiscrepancyHypers& dh, double sigma);

// joint zero-mean density of [z; y] under the product-SE surrogate kernel;
// experimental rows carry (x_i, theta), synthetic rows (x_j, theta_j);
// sigma^2 on the experimental diagonal, 1e-8 lambda_x on the synthetic one
double loglik_bce(const Eigen::VectorXd& z, const Eigen::VectorXd& x_nd,
                  const Eigen::Vector4d& theta_mult, const Eigen::VectorXd& xs_nd,
                  const Eigen::MatrixXd& thetas, const Eigen::VectorXd& ys,
                  const SurrogateHypers& sh, double sigma);

// as loglik_bce with K_d added to the experimental block only
double loglik_bced(const Eigen::VectorXd& z, const Eigen::VectorXd& x_nd,
                   const Eigen::Vector4d& theta_mult, const Eigen::VectorXd& xs_nd,
                   const Eigen::MatrixXd& thetas, const Eigen::VectorXd& ys,
                   const SurrogateHypers& sh, const DiscrepancyHypers& dh, double sigma);

// Precomputed-distance evaluator for the surrogate modes; one construction
// per calibration, thread-safe evaluation.
class SurrogateGpContext {
public:
  SurrogateGpContext(Eigen::VectorXd z, Eigen::VectorXd x_nd, Eigen::VectorXd xs_nd,
                     Eigen::MatrixXd thetas, Eigen::VectorXd ys);
  // dh == nullptr gives the BCE density, otherwise BCED
  double loglik(const Eigen::Vector4d& theta_mult, const SurrogateHypers& sh, double sigma,
                const DiscrepancyHypers* dh) const;
  int n_experimental() const { return M_; }
  int n_synthetic() const { return N_; }

private:
  int M_, N_;
  Eigen::VectorXd stacked_;             // [z; y]
  Eigen::MatrixXd Dee_, Dse_x_;         // squared x distances (M x M, N x M)
  Eigen::MatrixXd Dss_x_, Dss_t_;       // synthetic block squared distances
  Eigen::MatrixXd thetas_;              // N x 4
};

// Mode-specific log posterior over the packed sampler coordinates
// (theta multipliers, then log scales). Thread-safe.
class LogPosterior {
public:
  LogPosterior(CalibrationMode mode, const DataMoments& data, PriorSet priors, EtaFn eta,
               const SyntheticDataset* synth);

  int dim() const { return static_cast<int>(specs_.size()); }
  const std::vector<ParamSpec>& param_specs() const { return specs_; }
  CalibrationMode mode() const { return mode_; }
  const PriorSet& priors() const { return priors_; }
  const DataMoments& data() const { return data_; }

  double operator()(const Eigen::VectorXd& packed) const;
  // natural scale vector matching log_prior's argument convention
  Eigen::VectorXd prior_params(const Eigen::VectorXd& packed) const;

  long failed_evaluations() const { return n_failures_.load(); }

private:
  double likelihood(const Eigen::VectorXd& packed) const;

  CalibrationMode mode_;
  DataMoments data_;
  PriorSet priors_;
  EtaFn eta_;
  std::vector<ParamSpec> specs_;
  std::unique_ptr<SurrogateGpContext> surrogate_;
  mutable std::atomic<long> n_failures_{0};
};

}  // namespace gbmcal

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gbmcal {

// Stationary isotropic squared-exponential kernel.
struct SEKernel {
  double lambda;  // signal variance
  double beta;    // lengthscale
};

// Product-SE kernel over joint (x, theta) inputs: one lengthscale for the
// spatial block, one shared lengthscale for the whole parameter block.
struct SurrogateHypers {
  double beta_x;
  double beta_theta;
  double lambda_x;
};

struct DiscrepancyHypers {
  double beta_d;
  double lambda_d;
};

using KernelFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

double kernel_se(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const SEKernel& k);

double kernel_joint(const Eigen::VectorXd& x_p, const Eigen::VectorXd& theta_p,
                    const Eigen::VectorXd& x_q, const Eigen::VectorXd& theta_q,
                    const SurrogateHypers& h);

// K[i][j] = kernel(inputs[i], inputs[j]) plus nugget on the diagonal.
Eigen::MatrixXd build_cov(const std::vector<Eigen::VectorXd>& inputs, const KernelFn& kernel,
                          double nugget);
Eigen::MatrixXd build_cov(const std::vector<Eigen::VectorXd>& inputs, const KernelFn& kernel,
                          const Eigen::VectorXd& nugget_diag);

class NotPositiveDefiniteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CholeskyResult {
  Eigen::MatrixXd L;  // lower-triangular factor of K + jitter*I
  double jitter = 0.0;
  int retries = 0;
};

// Cholesky with escalating diagonal jitter: 1e-10 * mean(diag) growing x10
// per retry, at most 6 retries before giving up.
CholeskyResult chol_jitter(const Eigen::MatrixXd& K);

// zero-mean GP evidence: -1/2 y'K^-1 y - 1/2 log|K| - n/2 log(2 pi)
double gp_log_marginal(const Eigen::VectorXd& y, const Eigen::MatrixXd& K);

struct GpPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// zero-mean GP conditional with homoskedastic observation noise (a variance)
GpPosterior gp_posterior(const std::vector<Eigen::VectorXd>& train_in,
                         const Eigen::VectorXd& train_y, const KernelFn& kernel, double noise,
                         const std::vector<Eigen::VectorXd>& test_in);

// log N(r | 0, K); reused by every likelihood that factors a dense covariance
double mvn_logpdf_zero(const Eigen::VectorXd& r, const Eigen::MatrixXd& K);

}  // namespace gbmcal

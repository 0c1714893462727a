#include "gbmcal/gp.hpp"

#include <cmath>

namespace gbmcal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double kernel_se(const VectorXd& a, const VectorXd& b, const SEKernel& k) {
  if (a.size() != b.size()) throw std::invalid_argument("kernel_se: dimension mismatch");
  const double d2 = (a - b).squaredNorm();
  return k.lambda * std::exp(-d2 / (2.0 * k.beta * k.beta));
}

double kernel_joint(const VectorXd& x_p, const VectorXd& theta_p, const VectorXd& x_q,
                    const VectorXd& theta_q, const SurrogateHypers& h) {
  if (theta_p.size() != theta_q.size() || x_p.size() != x_q.size()) {
    throw std::invalid_argument("kernel_joint: dimension mismatch");
  }
  const double dx2 = (x_p - x_q).squaredNorm();
  const double dt2 = (theta_p - theta_q).squaredNorm();
  return h.lambda_x * std::exp(-dx2 / (2.0 * h.beta_x * h.beta_x) -
                               dt2 / (2.0 * h.beta_theta * h.beta_theta));
}

MatrixXd build_cov(const std::vector<VectorXd>& inputs, const KernelFn& kernel,
                   const VectorXd& nugget_diag) {
  const int n = static_cast<int>(inputs.size());
  if (nugget_diag.size() != n) throw std::invalid_argument("build_cov: nugget size mismatch");
  if (nugget_diag.size() > 0 && nugget_diag.minCoeff() < 0.0) {
    throw std::invalid_argument("build_cov: nugget must be nonnegative");
  }
  MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double kij = kernel(inputs[i], inputs[j]);
      K(i, j) = kij;
      K(j, i) = kij;
    }
    K(i, i) += nugget_diag[i];
  }
  return K;
}

MatrixXd build_cov(const std::vector<VectorXd>& inputs, const KernelFn& kernel, double nugget) {
  return build_cov(inputs, kernel,
                   VectorXd::Constant(static_cast<Eigen::Index>(inputs.size()), nugget));
}

CholeskyResult chol_jitter(const MatrixXd& K) {
  if (K.rows() != K.cols()) throw std::invalid_argument("chol_jitter: matrix must be square");
  const int n = static_cast<int>(K.rows());
  const double mean_diag = K.diagonal().cwiseAbs().mean();
  CholeskyResult out;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    MatrixXd Kj = K;
    if (jitter > 0.0) Kj.diagonal().array() += jitter;
    Eigen::LLT<MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      out.L = llt.matrixL();
      out.jitter = jitter;
      out.retries = attempt;
      return out;
    }
    jitter = (attempt == 0) ? 1e-10 * std::max(mean_diag, 1e-300) : jitter * 10.0;
  }
  throw NotPositiveDefiniteError("chol_jitter: matrix not positive definite after 6 retries (n = " +
                                 std::to_string(n) + ")");
}

double gp_log_marginal(const VectorXd& y, const MatrixXd& K) {
  if (y.size() != K.rows()) throw std::invalid_argument("gp_log_marginal: dimension mismatch");
  return mvn_logpdf_zero(y, K);
}

double mvn_logpdf_zero(const VectorXd& r, const MatrixXd& K) {
  const CholeskyResult ch = chol_jitter(K);
  const VectorXd alpha = ch.L.triangularView<Eigen::Lower>().solve(r);
  const double logdet = 2.0 * ch.L.diagonal().array().log().sum();
  return -0.5 * alpha.squaredNorm() - 0.5 * logdet -
         0.5 * static_cast<double>(r.size()) * kLog2Pi;
}

GpPosterior gp_posterior(const std::vector<VectorXd>& train_in, const VectorXd& train_y,
                         const KernelFn& kernel, double noise,
                         const std::vector<VectorXd>& test_in) {
  const int n = static_cast<int>(train_in.size());
  const int m = static_cast<int>(test_in.size());
  if (train_y.size() != n) throw std::invalid_argument("gp_posterior: y size mismatch");
  const MatrixXd K = build_cov(train_in, kernel, noise);
  const CholeskyResult ch = chol_jitter(K);

  MatrixXd Ks(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) Ks(i, j) = kernel(train_in[i], test_in[j]);
  }
  MatrixXd Kss(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double kij = kernel(test_in[i], test_in[j]);
      Kss(i, j) = kij;
      Kss(j, i) = kij;
    }
  }

  const auto Lt = ch.L.triangularView<Eigen::Lower>();
  const VectorXd alpha = Lt.solve(train_y);
  const MatrixXd V = Lt.solve(Ks);  // n x m

  GpPosterior post;
  post.mean = V.transpose() * alpha;
  post.cov = Kss - V.transpose() * V;
  // symmetrize away factorization round-off
  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();
  return post;
}

}  // namespace gbmcal

#include "gbmcal/calibration.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "gbmcal/pde.hpp"

namespace gbmcal {

using Eigen::MatrixXd;
using Eigen::Vector4d;
using Eigen::VectorXd;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}  // namespace

double loglik_bi(const VectorXd& z, const VectorXd& eta, double sigma) {
  if (z.size() != eta.size()) throw std::invalid_argument("loglik_bi: size mismatch");
  if (!(sigma > 0.0)) return kNegInf;
  const double rss = (z - eta).squaredNorm();
  const double m = static_cast<double>(z.size());
  return -0.5 * m * (kLog2Pi + 2.0 * std::log(sigma)) - 0.5 * rss / (sigma * sigma);
}

double loglik_bcd(const VectorXd& z, const VectorXd& eta, const VectorXd& x_nd,
                  const DiscrepancyHypers& dh, double sigma) {
  const int m = static_cast<int>(z.size());
  if (eta.size() != m || x_nd.size() != m) throw std::invalid_argument("loglik_bcd: size mismatch");
  if (!(sigma > 0.0)) return kNegInf;
  MatrixXd K(m, m);
  const double ad = 0.5 / (dh.beta_d * dh.beta_d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double d = x_nd[i] - x_nd[j];
      const double k = dh.lambda_d * std::exp(-ad * d * d);
      K(i, j) = k;
      K(j, i) = k;
    }
    K(i, i) += sigma * sigma;
  }
  Eigen::LLT<MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return kNegInf;
  VectorXd r = z - eta;
  llt.matrixL().solveInPlace(r);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * r.squaredNorm() - 0.5 * logdet - 0.5 * m * kLog2Pi;
}

SurrogateGpContext::SurrogateGpContext(VectorXd z, VectorXd x_nd, VectorXd xs_nd, MatrixXd thetas,
                                       VectorXd ys)
    : M_(static_cast<int>(z.size())),
      N_(static_cast<int>(ys.size())),
      thetas_(std::move(thetas)) {
  if (x_nd.size() != M_) throw std::invalid_argument("surrogate context: x/z size mismatch");
  if (xs_nd.size() != N_ || thetas_.rows() != N_) {
    throw std::invalid_argument("surrogate context: synthetic sizes mismatch");
  }
  stacked_.resize(M_ + N_);
  stacked_ << z, ys;
  Dee_.resize(M_, M_);
  for (int i = 0; i < M_; ++i) {
    for (int j = 0; j < M_; ++j) {
      const double d = x_nd[i] - x_nd[j];
      Dee_(i, j) = d * d;
    }
  }
  Dse_x_.resize(N_, M_);
  for (int j = 0; j < N_; ++j) {
    for (int i = 0; i < M_; ++i) {
      const double d = xs_nd[j] - x_nd[i];
      Dse_x_(j, i) = d * d;
    }
  }
  Dss_x_.resize(N_, N_);
  Dss_t_.resize(N_, N_);
  for (int i = 0; i < N_; ++i) {
    for (int j = 0; j < N_; ++j) {
      const double d = xs_nd[i] - xs_nd[j];
      Dss_x_(i, j) = d * d;
      Dss_t_(i, j) = (thetas_.row(i) - thetas_.row(j)).squaredNorm();
    }
  }
}

double SurrogateGpContext::loglik(const Vector4d& theta_mult, const SurrogateHypers& sh,
                                  double sigma, const DiscrepancyHypers* dh) const {
  if (!(sigma > 0.0) || !(sh.beta_x > 0.0) || !(sh.beta_theta > 0.0) || !(sh.lambda_x > 0.0)) {
    return kNegInf;
  }
  const int P = M_ + N_;
  static thread_local MatrixXd S;
  static thread_local VectorXd r, dt;
  S.resize(P, P);
  r = stacked_;
  const double ax = 0.5 / (sh.beta_x * sh.beta_x);
  const double at = 0.5 / (sh.beta_theta * sh.beta_theta);

  S.topLeftCorner(M_, M_) = ((-ax) * Dee_.array()).exp().matrix() * sh.lambda_x;
  if (dh != nullptr) {
    if (!(dh->beta_d > 0.0) || !(dh->lambda_d > 0.0)) return kNegInf;
    const double ad = 0.5 / (dh->beta_d * dh->beta_d);
    S.topLeftCorner(M_, M_) += (((-ad) * Dee_.array()).exp() * dh->lambda_d).matrix();
  }
  S.topLeftCorner(M_, M_).diagonal().array() += sigma * sigma;

  if (N_ > 0) {
    dt.resize(N_);
    for (int jj = 0; jj < N_; ++jj) {
      dt[jj] = (thetas_.row(jj).transpose() - theta_mult).squaredNorm();
    }
    S.bottomLeftCorner(N_, M_) =
        ((((-ax) * Dse_x_).array().colwise() + (-at) * dt.array()).exp()).matrix() * sh.lambda_x;
    S.bottomRightCorner(N_, N_) =
        ((-ax) * Dss_x_.array() + (-at) * Dss_t_.array()).exp().matrix() * sh.lambda_x;
    S.bottomRightCorner(N_, N_).diagonal().array() += 1e-8 * sh.lambda_x;
  }

  Eigen::Ref<MatrixXd> Sref(S);
  Eigen::LLT<Eigen::Ref<MatrixXd>> llt(Sref);  // in-place factorization
  if (llt.info() != Eigen::Success) return kNegInf;
  llt.matrixL().solveInPlace(r);
  const double logdet = 2.0 * S.diagonal().array().log().sum();
  return -0.5 * r.squaredNorm() - 0.5 * logdet - 0.5 * P * kLog2Pi;
}

double loglik_bce(const VectorXd& z, const VectorXd& x_nd, const Vector4d& theta_mult,
                  const VectorXd& xs_nd, const MatrixXd& thetas, const VectorXd& ys,
                  const SurrogateHypers& sh, double sigma) {
  SurrogateGpContext ctx(z, x_nd, xs_nd, thetas, ys);
  return ctx.loglik(theta_mult, sh, sigma, nullptr);
}

double loglik_bced(const VectorXd& z, const VectorXd& x_nd, const Vector4d& theta_mult,
                   const VectorXd& xs_nd, const MatrixXd& thetas, const VectorXd& ys,
                   const SurrogateHypers& sh, const DiscrepancyHypers& dh, double sigma) {
  SurrogateGpContext ctx(z, x_nd, xs_nd, thetas, ys);
  return ctx.loglik(theta_mult, sh, sigma, &dh);
}

LogPosterior::LogPosterior(CalibrationMode mode, const DataMoments& data, PriorSet priors,
                           EtaFn eta, const SyntheticDataset* synth)
    : mode_(mode), data_(data), priors_(std::move(priors)), eta_(std::move(eta)) {
  specs_ = mode_params(mode_);
  if (mode_uses_surrogate(mode_)) {
    if (synth == nullptr || synth->size() == 0) {
      throw std::invalid_argument(mode_name(mode_) + " requires a synthetic dataset");
    }
    const VectorXd ys_std = (synth->y.array() - data_.std_mean) / data_.std_sd;
    surrogate_ = std::make_unique<SurrogateGpContext>(data_.z_std, data_.x_nd, synth->x,
                                                      synth->theta, ys_std);
  } else {
    if (!eta_) throw std::invalid_argument(mode_name(mode_) + " requires the forward model");
  }
}

VectorXd LogPosterior::prior_params(const VectorXd& packed) const {
  VectorXd nat(packed.size());
  for (Eigen::Index k = 0; k < packed.size(); ++k) {
    nat[k] = (specs_[static_cast<size_t>(k)].kind == ParamKind::LogScale) ? std::exp(packed[k])
                                                                          : packed[k];
  }
  return nat;
}

double LogPosterior::likelihood(const VectorXd& packed) const {
  const Vector4d m = packed.head<4>();
  const int off = 4;
  switch (mode_) {
    case CalibrationMode::BI: {
      const double sigma = std::exp(packed[off]);
      const VectorXd eta = eta_(m);
      return loglik_bi(data_.z_nd, eta, sigma);
    }
    case CalibrationMode::BCD: {
      const DiscrepancyHypers dh{std::exp(packed[off]), std::exp(packed[off + 1])};
      const double sigma = std::exp(packed[off + 2]);
      const VectorXd eta = eta_(m);
      const VectorXd eta_std = (eta.array() - data_.std_mean) / data_.std_sd;
      return loglik_bcd(data_.z_std, eta_std, data_.x_nd, dh, sigma);
    }
    case CalibrationMode::BCE: {
      const SurrogateHypers sh{std::exp(packed[off]), std::exp(packed[off + 1]),
                               std::exp(packed[off + 2])};
      const double sigma = std::exp(packed[off + 3]);
      return surrogate_->loglik(m, sh, sigma, nullptr);
    }
    case CalibrationMode::BCED: {
      const SurrogateHypers sh{std::exp(packed[off]), std::exp(packed[off + 1]),
                               std::exp(packed[off + 2])};
      const DiscrepancyHypers dh{std::exp(packed[off + 3]), std::exp(packed[off + 4])};
      const double sigma = std::exp(packed[off + 5]);
      return surrogate_->loglik(m, sh, sigma, &dh);
    }
  }
  throw std::logic_error("likelihood: bad mode");
}

double LogPosterior::operator()(const VectorXd& packed) const {
  if (packed.size() != dim()) throw std::invalid_argument("log posterior: bad dimension");
  double lp = log_prior(prior_params(packed), priors_);
  if (!std::isfinite(lp)) return kNegInf;
  // log-space sampling Jacobian for the positive scales
  for (Eigen::Index k = 0; k < packed.size(); ++k) {
    if (specs_[static_cast<size_t>(k)].kind == ParamKind::LogScale) lp += packed[k];
  }
  double lik;
  try {
    lik = likelihood(packed);
  } catch (const std::exception& e) {
    const long n = ++n_failures_;
    if (n <= 10 || n % 1000 == 0) {
      std::cerr << "log-posterior: likelihood evaluation failed (" << e.what()
                << "), treating proposal as rejected [" << n << " failures so far]\n";
    }
    return kNegInf;
  }
  if (!std::isfinite(lik)) return kNegInf;
  return lp + lik;
}

}  // namespace gbmcal

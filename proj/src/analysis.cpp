#include "gbmcal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gbmcal/gp.hpp"

namespace gbmcal {

using Eigen::MatrixXd;
using Eigen::Vector4d;
using Eigen::VectorXd;

double profile_error(const CellProfile& pred, const CellProfile& exp, double c_sat, double L) {
  if (exp.x.size() < 2) throw std::invalid_argument("profile_error: need at least 2 points");
  if (!(c_sat > 0.0) || !(L > 0.0)) throw std::invalid_argument("profile_error: bad scales");
  if (pred.x.size() == 0) throw std::invalid_argument("profile_error: empty prediction");
  if (exp.x.minCoeff() < pred.x.minCoeff() - 1e-9 * L ||
      exp.x.maxCoeff() > pred.x.maxCoeff() + 1e-9 * L) {
    throw std::invalid_argument("profile_error: prediction does not cover the data support");
  }
  const VectorXd up = interp_linear(pred.x, pred.u, exp.x);
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < exp.x.size(); ++i) {
    const double r0 = (up[i] - exp.u[i]) / c_sat;
    const double r1 = (up[i + 1] - exp.u[i + 1]) / c_sat;
    const double dx = (exp.x[i + 1] - exp.x[i]) / L;
    acc += 0.5 * (r0 * r0 + r1 * r1) * dx;
  }
  return std::sqrt(acc);
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, n - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

}  // namespace

Eigen::VectorXd compute_rhat(const Chain& chain) {
  // split each walker sequence in half; between/within variance over the
  // resulting 2 * n_walkers chains
  const int S = chain.n_steps / 2;
  VectorXd rhat = VectorXd::Ones(chain.n_params);
  if (S < 2) return rhat;
  const int m = 2 * chain.n_walkers;
  const auto specs = chain.meta.specs();
  const CalibrationParameters ref = chain.meta.reference();
  for (int p = 0; p < chain.n_params; ++p) {
    VectorXd means(m), vars(m);
    for (int c = 0; c < m; ++c) {
      const int w = c % chain.n_walkers;
      const int off = (c / chain.n_walkers) * S;
      double mu = 0.0;
      for (int s = 0; s < S; ++s) {
        mu += natural_value(chain.sample(off + s, w, p), specs[p], ref);
      }
      mu /= S;
      double v = 0.0;
      for (int s = 0; s < S; ++s) {
        const double d = natural_value(chain.sample(off + s, w, p), specs[p], ref) - mu;
        v += d * d;
      }
      means[c] = mu;
      vars[c] = v / (S - 1);
    }
    const double W = vars.mean();
    const double mu_all = means.mean();
    const double B = S * (means.array() - mu_all).square().sum() / (m - 1);
    if (W <= 0.0) continue;
    const double var_plus = (S - 1.0) / S * W + B / S;
    rhat[p] = std::sqrt(var_plus / W);
  }
  return rhat;
}

PosteriorSummary summarize(const Chain& chain) {
  if (chain.n_steps < 1) throw std::invalid_argument("summarize: empty chain");
  const auto specs = chain.meta.specs();
  const CalibrationParameters ref = chain.meta.reference();
  const long n = chain.n_retained_samples();

  PosteriorSummary out;
  out.map_log_post = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < chain.n_steps; ++s) {
    for (int w = 0; w < chain.n_walkers; ++w) {
      if (chain.logp(s, w) > out.map_log_post) {
        out.map_log_post = chain.logp(s, w);
        out.map_step = s;
        out.map_walker = w;
      }
    }
  }
  out.map_packed = chain.walker_at(out.map_step, out.map_walker);
  const VectorXd map_nat = natural_values(out.map_packed, specs, ref);

  MatrixXd nat(n, chain.n_params);
  long row = 0;
  for (int s = 0; s < chain.n_steps; ++s) {
    for (int w = 0; w < chain.n_walkers; ++w, ++row) {
      for (int p = 0; p < chain.n_params; ++p) {
        nat(row, p) = natural_value(chain.sample(s, w, p), specs[p], ref);
      }
    }
  }

  for (int p = 0; p < chain.n_params; ++p) {
    ParamSummary ps;
    ps.name = specs[p].name;
    ps.map = map_nat[p];
    ps.mean = nat.col(p).mean();
    std::vector<double> sorted(nat.col(p).data(), nat.col(p).data() + n);
    std::sort(sorted.begin(), sorted.end());
    ps.median = quantile_sorted(sorted, 0.5);
    ps.lo95 = quantile_sorted(sorted, 0.025);
    ps.hi95 = quantile_sorted(sorted, 0.975);
    out.params.push_back(ps);
  }

  const MatrixXd centered = nat.rowwise() - nat.colwise().mean();
  MatrixXd cov = centered.transpose() * centered / std::max<long>(n - 1, 1);
  out.correlation.resize(chain.n_params, chain.n_params);
  for (int i = 0; i < chain.n_params; ++i) {
    for (int j = 0; j < chain.n_params; ++j) {
      const double den = std::sqrt(cov(i, i) * cov(j, j));
      out.correlation(i, j) = (den > 0.0) ? cov(i, j) / den : (i == j ? 1.0 : 0.0);
    }
  }
  out.rhat = compute_rhat(chain);
  return out;
}

PredictiveBand predictive_band(const Chain& chain, const ForwardModel& model,
                               const VectorXd& x_query_nd, int n_draws, uint64_t seed,
                               int n_threads) {
  if (chain.meta.mode != "bi" && chain.meta.mode != "bcd") {
    throw std::invalid_argument("predictive_band: needs a model-based chain (bi or bcd)");
  }
  const long total = chain.n_retained_samples();
  if (n_draws < 2 || n_draws > total) {
    throw std::invalid_argument("predictive_band: n_draws must be in [2, retained samples]");
  }
  // sigma is on the standardized scale for bcd chains
  double sigma_scale = 1.0;
  if (chain.meta.mode == "bcd") {
    sigma_scale = chain.meta.extra.at("standardization").at("sd").get<double>();
  }
  const auto specs = chain.meta.specs();
  int sigma_idx = -1;
  for (size_t k = 0; k < specs.size(); ++k) {
    if (specs[k].name == "sigma") sigma_idx = static_cast<int>(k);
  }

  // draw indices without replacement
  std::vector<long> idx(total);
  std::iota(idx.begin(), idx.end(), 0L);
  Rng rng(seed, 0x50524544ULL);
  for (int i = 0; i < n_draws; ++i) {
    const long j = i + static_cast<long>(rng.uniform_int(static_cast<uint64_t>(total - i)));
    std::swap(idx[i], idx[static_cast<size_t>(j)]);
  }

  const int nq = static_cast<int>(x_query_nd.size());
  MatrixXd profiles(n_draws, nq);  // model profile, nondim
  VectorXd noise(n_draws);
  std::vector<char> ok(n_draws, 0);

#ifdef _OPENMP
  const int nt = (n_threads > 0) ? n_threads : omp_get_num_procs();
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1)
#endif
  for (int i = 0; i < n_draws; ++i) {
    const int s = static_cast<int>(idx[i] / chain.n_walkers);
    const int w = static_cast<int>(idx[i] % chain.n_walkers);
    const VectorXd packed = chain.walker_at(s, w);
    Rng drng(seed, 0x4e4f4953ULL + static_cast<uint64_t>(i));
    const double sigma = std::exp(packed[sigma_idx]) * sigma_scale;
    try {
      profiles.row(i) = model.eta_from_multipliers(packed.head<4>(), x_query_nd).transpose();
      noise[i] = drng.normal(0.0, sigma);
      ok[i] = 1;
    } catch (const std::exception& e) {
#pragma omp critical
      std::cerr << "predictive_band: draw " << i << " skipped: " << e.what() << "\n";
    }
  }
  long n_ok = 0;
  for (int i = 0; i < n_draws; ++i) n_ok += ok[i];
  if (n_ok * 10 < 9L * n_draws) {
    throw std::runtime_error("predictive_band: more than 10% of draws failed");
  }

  const double c_sat = model.constants().c_sat;
  PredictiveBand band;
  band.x = x_query_nd * model.constants().L;
  band.mean.setZero(nq);
  band.sd.setZero(nq);
  for (int i = 0; i < n_draws; ++i) {
    if (ok[i]) band.mean += profiles.row(i).transpose();
  }
  band.mean /= static_cast<double>(n_ok);
  for (int i = 0; i < n_draws; ++i) {
    if (!ok[i]) continue;
    const VectorXd dev = profiles.row(i).transpose().array() + noise[i] - band.mean.array();
    band.sd += dev.cwiseProduct(dev);
  }
  band.sd = (band.sd / static_cast<double>(n_ok - 1)).cwiseSqrt();
  band.mean *= c_sat;
  band.sd *= c_sat;
  band.lo = band.mean - 2.0 * band.sd;
  band.hi = band.mean + 2.0 * band.sd;
  return band;
}

namespace {

// MAP sample in sampler coordinates
VectorXd map_packed_of(const Chain& chain) {
  double best = -std::numeric_limits<double>::infinity();
  int bs = 0, bw = 0;
  for (int s = 0; s < chain.n_steps; ++s) {
    for (int w = 0; w < chain.n_walkers; ++w) {
      if (chain.logp(s, w) > best) {
        best = chain.logp(s, w);
        bs = s;
        bw = w;
      }
    }
  }
  return chain.walker_at(bs, bw);
}

int param_index(const Chain& chain, const std::string& name) {
  for (size_t k = 0; k < chain.meta.param_names.size(); ++k) {
    if (chain.meta.param_names[k] == name) return static_cast<int>(k);
  }
  throw std::invalid_argument("chain has no parameter '" + name + "'");
}

}  // namespace

DiscrepancyCurve reconstruct_discrepancy(const Chain& chain, const DataMoments& data,
                                         const ForwardModel& model, const VectorXd& x_query_nd) {
  if (chain.meta.mode != "bcd" && chain.meta.mode != "bced") {
    throw std::invalid_argument("reconstruct_discrepancy: chain mode has no discrepancy term");
  }
  const VectorXd packed = map_packed_of(chain);
  const Vector4d m = packed.head<4>();
  const double beta_d = std::exp(packed[param_index(chain, "beta_d")]);
  const double lambda_d = std::exp(packed[param_index(chain, "lambda_d")]);
  const double sigma = std::exp(packed[param_index(chain, "sigma")]);

  const VectorXd eta = model.eta_from_multipliers(m, data.x_nd);
  const VectorXd eta_std = (eta.array() - data.std_mean) / data.std_sd;
  const VectorXd resid = data.z_std - eta_std;

  std::vector<VectorXd> train, test;
  for (Eigen::Index i = 0; i < data.x_nd.size(); ++i) {
    train.push_back(VectorXd::Constant(1, data.x_nd[i]));
  }
  for (Eigen::Index i = 0; i < x_query_nd.size(); ++i) {
    test.push_back(VectorXd::Constant(1, x_query_nd[i]));
  }
  const SEKernel kern{lambda_d, beta_d};
  const KernelFn kf = [&kern](const VectorXd& a, const VectorXd& b) {
    return kernel_se(a, b, kern);
  };
  const GpPosterior post = gp_posterior(train, resid, kf, sigma * sigma, test);

  DiscrepancyCurve out;
  out.x = x_query_nd;
  out.mean = post.mean * data.std_sd;  // back to z_nd units (deviations carry no mean shift)
  out.sd = post.cov.diagonal().cwiseMax(0.0).cwiseSqrt() * data.std_sd;
  return out;
}

VectorXd deviation(const DataMoments& data, const Vector4d& theta_mult_hat,
                   const ForwardModel& model) {
  const VectorXd eta = model.eta_from_multipliers(theta_mult_hat, data.x_nd);
  return data.z_nd - eta;
}

double fisher_wave_speed(double D_n, double tau_n) {
  if (!(D_n > 0.0) || !(tau_n > 0.0)) {
    throw std::invalid_argument("fisher_wave_speed: inputs must be positive");
  }
  return 2.0 * std::sqrt(D_n / tau_n);
}

SurrogateCurve surrogate_predict(const Chain& chain, const DataMoments& data,
                                 const SyntheticDataset& synth, const VectorXd& xq_nd) {
  if (chain.meta.mode != "bce" && chain.meta.mode != "bced") {
    throw std::invalid_argument("surrogate_predict: chain mode has no surrogate");
  }
  const bool with_disc = chain.meta.mode == "bced";
  const VectorXd packed = map_packed_of(chain);
  const Vector4d m = packed.head<4>();
  const SurrogateHypers sh{std::exp(packed[param_index(chain, "beta_x")]),
                           std::exp(packed[param_index(chain, "beta_theta")]),
                           std::exp(packed[param_index(chain, "lambda_x")])};
  DiscrepancyHypers dh{1.0, 0.0};
  if (with_disc) {
    dh.beta_d = std::exp(packed[param_index(chain, "beta_d")]);
    dh.lambda_d = std::exp(packed[param_index(chain, "lambda_d")]);
  }
  const double sigma = std::exp(packed[param_index(chain, "sigma")]);

  const int M = static_cast<int>(data.x_nd.size());
  const int N = synth.size();
  const int P = M + N;
  const VectorXd ys_std = (synth.y.array() - data.std_mean) / data.std_sd;
  VectorXd s(P);
  s << data.z_std, ys_std;

  // row inputs in likelihood order: experimental (x_i, theta_MAP), synthetic
  auto row_x = [&](int r) { return r < M ? data.x_nd[r] : synth.x[r - M]; };
  auto row_t = [&](int r) -> Eigen::RowVector4d {
    return r < M ? Eigen::RowVector4d(m.transpose()) : Eigen::RowVector4d(synth.theta.row(r - M));
  };
  const double ax = 0.5 / (sh.beta_x * sh.beta_x);
  const double at = 0.5 / (sh.beta_theta * sh.beta_theta);
  const double ad = 0.5 / (dh.beta_d * dh.beta_d);

  MatrixXd Sigma(P, P);
  for (int i = 0; i < P; ++i) {
    for (int jdx = 0; jdx <= i; ++jdx) {
      const double dx = row_x(i) - row_x(jdx);
      const double dt = (row_t(i) - row_t(jdx)).squaredNorm();
      double k = sh.lambda_x * std::exp(-ax * dx * dx - at * dt);
      if (with_disc && i < M && jdx < M) k += dh.lambda_d * std::exp(-ad * dx * dx);
      Sigma(i, jdx) = k;
      Sigma(jdx, i) = k;
    }
    Sigma(i, i) += (i < M) ? sigma * sigma : 1e-8 * sh.lambda_x;
  }

  const int Q = static_cast<int>(xq_nd.size());
  MatrixXd Ks(P, Q);  // cross-covariance of the surrogate component only
  for (int i = 0; i < P; ++i) {
    const double ti = (row_t(i) - m.transpose()).squaredNorm();
    for (int q = 0; q < Q; ++q) {
      const double dx = row_x(i) - xq_nd[q];
      Ks(i, q) = sh.lambda_x * std::exp(-ax * dx * dx - at * ti);
    }
  }

  const CholeskyResult ch = chol_jitter(Sigma);
  const auto Lt = ch.L.triangularView<Eigen::Lower>();
  const VectorXd alpha = Lt.solve(s);
  const MatrixXd V = Lt.solve(Ks);

  SurrogateCurve out;
  out.x_nd = xq_nd;
  out.mean_nd = (V.transpose() * alpha).array() * data.std_sd + data.std_mean;
  VectorXd var = VectorXd::Constant(Q, sh.lambda_x) - V.colwise().squaredNorm().transpose();
  out.sd_nd = var.cwiseMax(0.0).cwiseSqrt() * data.std_sd;
  return out;
}

void corner_export(const Chain& chain, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (chain.n_steps < 1) throw std::invalid_argument("corner_export: empty chain");
  const auto specs = chain.meta.specs();
  const CalibrationParameters ref = chain.meta.reference();
  const long n = chain.n_retained_samples();
  const int d = chain.n_params;
  constexpr int kBins = 50;

  MatrixXd nat(n, d);
  long row = 0;
  for (int s = 0; s < chain.n_steps; ++s) {
    for (int w = 0; w < chain.n_walkers; ++w, ++row) {
      for (int p = 0; p < d; ++p) {
        nat(row, p) = natural_value(chain.sample(s, w, p), specs[p], ref);
      }
    }
  }
  const VectorXd map_nat = natural_values(map_packed_of(chain), specs, ref);

  auto bin_of = [&](double v, double lo, double hi) {
    if (hi <= lo) return 0;
    int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
    return std::clamp(b, 0, kBins - 1);
  };

  {
    std::ofstream fm(out_dir + "/corner_markers.csv");
    fm << "param,map,mean\n";
    fm.precision(12);
    for (int p = 0; p < d; ++p) {
      fm << specs[p].name << ',' << map_nat[p] << ',' << nat.col(p).mean() << '\n';
    }
  }

  for (int p = 0; p < d; ++p) {
    const double lo = nat.col(p).minCoeff();
    const double hi = nat.col(p).maxCoeff();
    std::vector<long> counts(kBins, 0);
    for (long i = 0; i < n; ++i) ++counts[bin_of(nat(i, p), lo, hi)];
    std::ofstream f(out_dir + "/corner_" + specs[p].name + ".csv");
    f.precision(12);
    f << "bin_center,count\n";
    for (int b = 0; b < kBins; ++b) {
      const double c = (hi > lo) ? lo + (b + 0.5) * (hi - lo) / kBins : lo;
      f << c << ',' << counts[b] << '\n';
    }
  }

  for (int p = 0; p < d; ++p) {
    for (int q = p + 1; q < d; ++q) {
      const double lop = nat.col(p).minCoeff(), hip = nat.col(p).maxCoeff();
      const double loq = nat.col(q).minCoeff(), hiq = nat.col(q).maxCoeff();
      MatrixXd counts = MatrixXd::Zero(kBins, kBins);
      for (long i = 0; i < n; ++i) {
        counts(bin_of(nat(i, p), lop, hip), bin_of(nat(i, q), loq, hiq)) += 1.0;
      }
      std::ofstream f(out_dir + "/corner_" + specs[p].name + "_" + specs[q].name + ".csv");
      f.precision(12);
      f << "# rows: " << specs[p].name << " bins, cols: " << specs[q].name << " bins\n";
      for (int r = 0; r < kBins; ++r) {
        for (int c = 0; c < kBins; ++c) f << counts(r, c) << (c + 1 < kBins ? ',' : '\n');
      }
    }
  }
}

}  // namespace gbmcal

#include "gbmcal/priors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gbmcal {

using Eigen::VectorXd;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double GammaPrior::logpdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

const GammaPrior& PriorSet::scale(const std::string& name) const {
  const auto it = scales.find(name);
  if (it == scales.end()) {
    throw std::invalid_argument("PriorSet: no prior for parameter '" + name + "'");
  }
  return it->second;
}

nlohmann::json PriorSet::to_json() const {
  nlohmann::json j;
  j["mode"] = mode_name(mode);
  j["box_lo"] = {box.lo[0], box.lo[1], box.lo[2], box.lo[3]};
  j["box_hi"] = {box.hi[0], box.hi[1], box.hi[2], box.hi[3]};
  for (const auto& [name, g] : scales) {
    j["gamma"][name] = {{"shape", g.shape}, {"rate", g.rate}};
  }
  return j;
}

PriorSet PriorSet::from_json(const nlohmann::json& j) {
  PriorSet p;
  p.mode = mode_from_string(j.at("mode").get<std::string>());
  for (int k = 0; k < 4; ++k) {
    p.box.lo[k] = j.at("box_lo")[k];
    p.box.hi[k] = j.at("box_hi")[k];
  }
  if (j.contains("gamma")) {
    for (const auto& [name, g] : j.at("gamma").items()) {
      p.scales[name] = {g.at("shape").get<double>(), g.at("rate").get<double>()};
    }
  }
  return p;
}

DataMoments compute_data_moments(const VectorXd& x_nd, const VectorXd& z_nd) {
  if (x_nd.size() != z_nd.size()) throw std::invalid_argument("data moments: size mismatch");
  if (x_nd.size() < 2) {
    throw std::invalid_argument("need at least 2 data points to form pairwise distances");
  }
  DataMoments m;
  m.x_nd = x_nd;
  m.z_nd = z_nd;
  m.std_mean = z_nd.mean();
  const double var = (z_nd.array() - m.std_mean).square().sum() / (z_nd.size() - 1);
  m.std_sd = std::sqrt(var);
  if (!(m.std_sd > 0.0)) {
    throw std::invalid_argument("degenerate data: responses have zero variance");
  }
  m.z_std = (z_nd.array() - m.std_mean) / m.std_sd;
  return m;
}

namespace {

double mean_pairwise_distance_1d(const VectorXd& x) {
  const int n = static_cast<int>(x.size());
  double sum = 0.0;
  long cnt = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sum += std::abs(x[i] - x[j]);
      ++cnt;
    }
  }
  return sum / static_cast<double>(cnt);
}

double mean_pairwise_distance_rows(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  if (n < 2) throw std::invalid_argument("need at least 2 synthetic points for theta distances");
  double sum = 0.0;
  long cnt = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sum += (pts.row(i) - pts.row(j)).norm();
      ++cnt;
    }
  }
  return sum / static_cast<double>(cnt);
}

}  // namespace

PriorSet default_priors(const DataMoments& data, const SyntheticDataset* synth,
                        CalibrationMode mode, const DesignBox& box) {
  box.validate();
  PriorSet p;
  p.mode = mode;
  p.box = box;

  const double d_x = mean_pairwise_distance_1d(data.x_nd);
  if (!(d_x > 0.0)) throw std::invalid_argument("default_priors: coincident data coordinates");
  const double s_std = std::sqrt((data.z_std.array() - data.z_std.mean()).square().sum() /
                                 (data.z_std.size() - 1));

  if (mode_uses_surrogate(mode)) {
    if (synth == nullptr || synth->size() < 2) {
      throw std::invalid_argument(mode_name(mode) + " needs a synthetic dataset for its priors");
    }
    const double d_theta = mean_pairwise_distance_rows(synth->theta);
    p.scales["beta_x"] = {5.0, 5.0 / d_x};
    p.scales["beta_theta"] = {5.0, 5.0 / d_theta};
    p.scales["lambda_x"] = {5.0, 5.0 / s_std};
  }
  if (mode_uses_discrepancy(mode)) {
    p.scales["beta_d"] = {5.0, 5.0 / d_x};
    p.scales["lambda_d"] = {5.0, 5.0 / s_std};
  }

  // sigma: mean 0.1 * mean|z| with sd a tenth of that mean, on the working
  // scale of the mode (raw nondimensional for BI, standardized otherwise)
  const VectorXd& z_work = (mode == CalibrationMode::BI) ? data.z_nd : data.z_std;
  const double ybar = z_work.cwiseAbs().mean();
  if (!(ybar > 0.0)) throw std::invalid_argument("default_priors: zero mean |z|");
  const double sigma_mean = 0.1 * ybar;
  p.scales["sigma"] = {100.0, 100.0 / sigma_mean};
  return p;
}

double log_prior(const VectorXd& natural_params, const PriorSet& priors) {
  const auto specs = mode_params(priors.mode);
  if (natural_params.size() != static_cast<Eigen::Index>(specs.size())) {
    throw std::invalid_argument("log_prior: parameter vector does not match mode");
  }
  double lp = 0.0;
  for (size_t k = 0; k < specs.size(); ++k) {
    const double v = natural_params[static_cast<Eigen::Index>(k)];
    if (specs[k].kind == ParamKind::LogScale) {
      if (!(v > 0.0)) return kNegInf;
      lp += priors.scale(specs[k].name).logpdf(v);
    } else {
      const int dim = static_cast<int>(k);  // theta multipliers come first
      if (v < priors.box.lo[dim] || v > priors.box.hi[dim]) return kNegInf;
      lp -= std::log(priors.box.hi[dim] - priors.box.lo[dim]);
    }
  }
  return lp;
}

}  // namespace gbmcal

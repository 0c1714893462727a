#include "gbmcal/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "gbmcal/rng.hpp"

namespace gbmcal {

using Eigen::MatrixXd;
using Eigen::Vector4d;
using Eigen::VectorXd;

void DesignBox::validate() const {
  for (int k = 0; k < 4; ++k) {
    if (!(lo[k] < hi[k])) throw std::invalid_argument("DesignBox: lo must be < hi per dimension");
    if (!(lo[k] > 0.0)) throw std::invalid_argument("DesignBox: bounds must be positive");
  }
}

bool DesignBox::contains(const Vector4d& m) const {
  for (int k = 0; k < 4; ++k) {
    if (m[k] < lo[k] || m[k] > hi[k]) return false;
  }
  return true;
}

MatrixXd latin_hypercube(int n, int d, uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("latin_hypercube: n and d must be >= 1");
  MatrixXd pts(n, d);
  for (int dim = 0; dim < d; ++dim) {
    Rng rng(seed, 0x4c48ULL * 1315423911ULL + static_cast<uint64_t>(dim));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i + 1)));
      std::swap(perm[i], perm[j]);
    }
    for (int i = 0; i < n; ++i) {
      pts(i, dim) = (perm[i] + rng.uniform01()) / static_cast<double>(n);
    }
  }
  return pts;
}

ExperimentalDataset select_experimental_points(const ExperimentalDataset& full, int n_lhs,
                                               uint64_t seed) {
  const int m = static_cast<int>(full.x.size());
  if (m < n_lhs + 2) {
    throw std::invalid_argument("select_experimental_points: dataset has " + std::to_string(m) +
                                " points, need at least " + std::to_string(n_lhs + 2));
  }
  int i_min = 0, i_max = 0;
  for (int i = 1; i < m; ++i) {
    if (full.x[i] < full.x[i_min]) i_min = i;
    if (full.x[i] > full.x[i_max]) i_max = i;
  }
  std::vector<int> chosen = {i_min, i_max};
  std::vector<bool> used(m, false);
  used[i_min] = used[i_max] = true;

  if (n_lhs > 0) {
    const MatrixXd targets01 = latin_hypercube(n_lhs, 1, seed);
    const double xlo = full.x[i_min], xhi = full.x[i_max];
    for (int k = 0; k < n_lhs; ++k) {
      const double target = xlo + targets01(k, 0) * (xhi - xlo);
      int best = -1;
      double best_dist = 0.0;
      for (int i = 0; i < m; ++i) {
        if (used[i]) continue;
        const double dist = std::abs(full.x[i] - target);
        if (best < 0 || dist < best_dist) {  // first match wins ties
          best = i;
          best_dist = dist;
        }
      }
      chosen.push_back(best);
      used[best] = true;
    }
  }
  std::sort(chosen.begin(), chosen.end(),
            [&](int a, int b) { return full.x[a] < full.x[b]; });

  ExperimentalDataset sub;
  sub.u0 = full.u0;
  sub.v0 = full.v0;
  sub.x.resize(chosen.size());
  sub.z.resize(chosen.size());
  for (size_t k = 0; k < chosen.size(); ++k) {
    sub.x[k] = full.x[chosen[k]];
    sub.z[k] = full.z[chosen[k]];
  }
  return sub;
}

SyntheticDataset generate_synthetic(int pool, int keep, const DesignBox& box,
                                    const VectorXd& x_design_nd, uint64_t seed,
                                    const SyntheticModelFn& model,
                                    const CalibrationParameters& reference, int n_threads) {
  box.validate();
  const int nx = static_cast<int>(x_design_nd.size());
  if (pool < 1 || nx < 1) throw std::invalid_argument("generate_synthetic: empty design");
  const long total = static_cast<long>(pool) * nx;
  if (keep < 1 || keep > total) {
    throw std::invalid_argument("generate_synthetic: keep must be in [1, pool * n_x] = [1, " +
                                std::to_string(total) + "]");
  }

  // parameter draws, one stream per draw index
  MatrixXd thetas(pool, 4);
  for (int p = 0; p < pool; ++p) {
    Rng rng(seed, 0x5359ULL + static_cast<uint64_t>(p));
    for (int k = 0; k < 4; ++k) thetas(p, k) = rng.uniform(box.lo[k], box.hi[k]);
  }

  MatrixXd outputs(pool, nx);
  std::vector<char> ok(pool, 0);

#ifdef _OPENMP
  const int nt = (n_threads > 0) ? n_threads : omp_get_num_procs();
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1)
#endif
  for (int p = 0; p < pool; ++p) {
    try {
      const Vector4d th = thetas.row(p).transpose();
      outputs.row(p) = model(th, x_design_nd).transpose();
      ok[p] = 1;
    } catch (const std::exception& e) {
#pragma omp critical
      std::cerr << "generate_synthetic: forward run " << p << " failed: " << e.what() << "\n";
    }
  }

  std::vector<long> records;  // canonical order (draw, x)
  records.reserve(total);
  long failed = 0;
  for (int p = 0; p < pool; ++p) {
    if (!ok[p]) {
      failed += nx;
      continue;
    }
    for (int q = 0; q < nx; ++q) records.push_back(static_cast<long>(p) * nx + q);
  }
  if (failed * 10 > total) {
    throw std::runtime_error("generate_synthetic: more than 10% of forward runs failed (" +
                             std::to_string(failed) + "/" + std::to_string(total) + " records)");
  }
  if (static_cast<long>(records.size()) < keep) {
    throw std::runtime_error("generate_synthetic: only " + std::to_string(records.size()) +
                             " records survived, cannot keep " + std::to_string(keep));
  }

  // uniform subsample without replacement, then restore canonical order
  Rng rng(seed, 0x5355425341ULL);
  const long avail = static_cast<long>(records.size());
  for (long i = 0; i < keep; ++i) {
    const long j = i + static_cast<long>(rng.uniform_int(static_cast<uint64_t>(avail - i)));
    std::swap(records[i], records[j]);
  }
  records.resize(keep);
  std::sort(records.begin(), records.end());

  SyntheticDataset ds;
  ds.x.resize(keep);
  ds.theta.resize(keep, 4);
  ds.y.resize(keep);
  for (long i = 0; i < keep; ++i) {
    const int p = static_cast<int>(records[i] / nx);
    const int q = static_cast<int>(records[i] % nx);
    ds.x[i] = x_design_nd[q];
    ds.theta.row(i) = thetas.row(p);
    ds.y[i] = outputs(p, q);
  }
  ds.seed = seed;
  ds.pool = pool;
  ds.box = box;
  ds.reference = reference;
  return ds;
}

void SyntheticDataset::save(const std::string& csv_path) const {
  std::ofstream f(csv_path);
  if (!f) throw std::runtime_error("cannot write " + csv_path);
  f.precision(17);
  f << "x,theta1,theta2,theta3,theta4,y\n";
  for (int i = 0; i < size(); ++i) {
    f << x[i] << ',' << theta(i, 0) << ',' << theta(i, 1) << ',' << theta(i, 2) << ','
      << theta(i, 3) << ',' << y[i] << '\n';
  }
  nlohmann::json meta;
  meta["seed"] = seed;
  meta["pool"] = pool;
  meta["box_lo"] = {box.lo[0], box.lo[1], box.lo[2], box.lo[3]};
  meta["box_hi"] = {box.hi[0], box.hi[1], box.hi[2], box.hi[3]};
  meta["reference"] = {{"tau_n", reference.tau_n},
                       {"chi", reference.chi},
                       {"b", reference.b},
                       {"j", reference.j}};
  meta["coordinates"] = "nondimensional (x/L, theta multipliers, u/c_sat)";
  std::ofstream fj(csv_path + ".json");
  if (!fj) throw std::runtime_error("cannot write " + csv_path + ".json");
  fj << meta.dump(2) << '\n';
}

SyntheticDataset SyntheticDataset::load(const std::string& csv_path) {
  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("cannot read " + csv_path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("x,theta1,theta2,theta3,theta4,y", 0) != 0) {
    throw std::runtime_error(csv_path + ": expected header 'x,theta1,theta2,theta3,theta4,y'");
  }
  std::vector<std::array<double, 6>> rows;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::array<double, 6> row{};
    size_t pos = 0;
    for (int k = 0; k < 6; ++k) {
      const size_t comma = line.find(',', pos);
      const std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
      row[k] = std::stod(tok);
      pos = (comma == std::string::npos) ? line.size() : comma + 1;
    }
    rows.push_back(row);
  }
  SyntheticDataset ds;
  const int n = static_cast<int>(rows.size());
  ds.x.resize(n);
  ds.theta.resize(n, 4);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.x[i] = rows[i][0];
    for (int k = 0; k < 4; ++k) ds.theta(i, k) = rows[i][1 + k];
    ds.y[i] = rows[i][5];
  }
  std::ifstream fj(csv_path + ".json");
  if (fj) {
    nlohmann::json meta = nlohmann::json::parse(fj);
    ds.seed = meta.value("seed", 0ULL);
    ds.pool = meta.value("pool", 0);
    if (meta.contains("box_lo")) {
      for (int k = 0; k < 4; ++k) {
        ds.box.lo[k] = meta["box_lo"][k];
        ds.box.hi[k] = meta["box_hi"][k];
      }
    }
    if (meta.contains("reference")) {
      ds.reference.tau_n = meta["reference"]["tau_n"];
      ds.reference.chi = meta["reference"]["chi"];
      ds.reference.b = meta["reference"]["b"];
      ds.reference.j = meta["reference"]["j"];
    }
  }
  return ds;
}

}  // namespace gbmcal

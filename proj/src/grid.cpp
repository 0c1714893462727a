#include "gbmcal/grid.hpp"

#include <stdexcept>

namespace gbmcal {

SpatialGrid SpatialGrid::uniform(int n_nodes, double L) {
  if (n_nodes < 3) throw std::invalid_argument("SpatialGrid: n_nodes must be >= 3");
  if (!(L > 0.0)) throw std::invalid_argument("SpatialGrid: L must be positive");
  SpatialGrid g;
  g.n_nodes = n_nodes;
  g.x = Eigen::VectorXd::LinSpaced(n_nodes, 0.0, L);
  return g;
}

void SpatialGrid::validate() const {
  if (n_nodes < 3 || x.size() != n_nodes) throw std::invalid_argument("SpatialGrid: bad node count");
  if (x[0] != 0.0) throw std::invalid_argument("SpatialGrid: x[0] must be 0");
  for (int i = 1; i < n_nodes; ++i) {
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("SpatialGrid: x must be strictly increasing");
  }
}

double interp_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double xq) {
  const int n = static_cast<int>(xs.size());
  if (n == 0 || ys.size() != n) throw std::invalid_argument("interp_linear: bad table");
  if (n == 1 || xq <= xs[0]) return ys[0];
  if (xq >= xs[n - 1]) return ys[n - 1];
  // binary search for the bracketing interval
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (xs[mid] <= xq) lo = mid; else hi = mid;
  }
  const double t = (xq - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

Eigen::VectorXd interp_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                              const Eigen::VectorXd& xq) {
  Eigen::VectorXd out(xq.size());
  for (Eigen::Index i = 0; i < xq.size(); ++i) out[i] = interp_linear(xs, ys, xq[i]);
  return out;
}

}  // namespace gbmcal

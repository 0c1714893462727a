#pragma once

#include <Eigen/Dense>

namespace gbmcal {

// Uniform 1-D mesh on [0, L], physical coordinates.
struct SpatialGrid {
  int n_nodes = 0;
  Eigen::VectorXd x;  // [cm], strictly increasing, x[0] = 0, x[n-1] = L

  static SpatialGrid uniform(int n_nodes, double L);
  double length() const { return x[x.size() - 1]; }
  void validate() const;
};

// Sampled live-cell density profile.
struct CellProfile {
  Eigen::VectorXd x;  // [cm]
  Eigen::VectorXd u;  // [cell/cm] (or normalized by c_sat; caller tracks)
};

// piecewise-linear interpolation; xq outside [xs.front, xs.back] clamps to
// the end values (profiles are only ever queried inside the chamber)
double interp_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double xq);
Eigen::VectorXd interp_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                              const Eigen::VectorXd& xq);

}  // namespace gbmcal

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "gbmcal/constants.hpp"
#include "gbmcal/grid.hpp"

namespace gbmcal {

// Per-dimension sampling bounds in multiplier space.
struct DesignBox {
  Eigen::Vector4d lo = Eigen::Vector4d::Constant(0.1);
  Eigen::Vector4d hi = Eigen::Vector4d::Constant(6.0);
  void validate() const;
  bool contains(const Eigen::Vector4d& m) const;
};

// Surrogate training records: dimensionless coordinate, parameter
// multipliers, dimensionless model output.
struct SyntheticDataset {
  Eigen::VectorXd x;      // nondimensional, in [0, 1]
  Eigen::MatrixXd theta;  // n x 4 multipliers
  Eigen::VectorXd y;      // u/c_sat at t = T
  // provenance
  uint64_t seed = 0;
  int pool = 0;
  DesignBox box;
  CalibrationParameters reference;

  int size() const { return static_cast<int>(x.size()); }
  void save(const std::string& csv_path) const;  // plus a .json sidecar
  static SyntheticDataset load(const std::string& csv_path);
};

// n points in [0,1]^d with exactly one sample per axis bin in every dimension
Eigen::MatrixXd latin_hypercube(int n, int d, uint64_t seed);

// Observed dataset at the experiment horizon plus the initial profiles the
// forward model needs.
struct ExperimentalDataset {
  CellProfile u0;     // physical units
  CellProfile v0;     // may be empty (defaults to zero)
  Eigen::VectorXd x;  // observation coordinates [cm]
  Eigen::VectorXd z;  // observed live-cell density [cell/cm]
};

// Anchors at min/max x plus the n_lhs data points nearest to stratified
// targets over [min x, max x], drawn without replacement.
ExperimentalDataset select_experimental_points(const ExperimentalDataset& full, int n_lhs,
                                               uint64_t seed);

// evaluates eta (nondim) at the design coordinates for one multiplier vector;
// throws on solver failure
using SyntheticModelFn =
    std::function<Eigen::VectorXd(const Eigen::Vector4d&, const Eigen::VectorXd&)>;

// Draws `pool` multiplier vectors uniformly in the box, harvests one record
// per (draw, design coordinate), subsamples `keep` records uniformly without
// replacement. Fully reproducible from the seed; forward runs may execute
// concurrently, record order is canonical (draw index, x index).
SyntheticDataset generate_synthetic(int pool, int keep, const DesignBox& box,
                                    const Eigen::VectorXd& x_design_nd, uint64_t seed,
                                    const SyntheticModelFn& model,
                                    const CalibrationParameters& reference, int n_threads = 0);

}  // namespace gbmcal

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbmcal/constants.hpp"
#include "gbmcal/grid.hpp"

namespace gbmcal {

struct SolverOptions {
  double rtol = 1e-6;
  double atol = 1e-9;  // nondimensional
  int n_out = 100;     // uniformly spaced output times over [0, T]
  long max_steps = 5000000;
};

// Physical-units snapshot of (live cells, dead cells, oxygen) on the grid.
struct StateSnapshot {
  double t = 0.0;     // [s]
  Eigen::VectorXd u;  // [cell/cm]
  Eigen::VectorXd v;  // [cell/cm]
  Eigen::VectorXd w;  // [mmHg]
};

struct SolveStats {
  long steps = 0;
  long rejected = 0;
  long rhs_evals = 0;
  long jac_evals = 0;
};

struct ForwardResult {
  StateSnapshot final_state;
  std::vector<StateSnapshot> trajectory;  // n_out snapshots when recorded
  SolveStats stats;
};

class SolveError : public std::runtime_error {
public:
  SolveError(const std::string& what, double t_fail)
      : std::runtime_error(what + " (t = " + std::to_string(t_fail) + ")"), t(t_fail) {}
  double t;
};

// Semi-discrete time derivatives of the governing system: conservative
// second-order flux differencing for migration and oxygen diffusion,
// nodewise reactions, Robin cell flux and Dirichlet oxygen at the ends.
void assemble_rhs(const StateSnapshot& state, const CalibrationParameters& theta,
                  const FixedConstants& consts, const SpatialGrid& grid,
                  Eigen::VectorXd& dudt, Eigen::VectorXd& dvdt, Eigen::VectorXd& dwdt);

// Integrates from t=0 to t=T_horizon with adaptive L-stable stepping
// (a Rosenbrock pair with embedded error control). Initial profiles are
// mapped onto the grid by linear interpolation; w starts at w0 everywhere.
ForwardResult solve_forward(const CalibrationParameters& theta, const FixedConstants& consts,
                            const SpatialGrid& grid, const CellProfile& u0,
                            const CellProfile& v0, const SolverOptions& opts = {},
                            bool record_trajectory = false);

// eta(x; theta) = u-hat(x, t=T; theta), linearly interpolated at x_query [cm].
CellProfile model_eta(const Eigen::VectorXd& x_query, const CalibrationParameters& theta,
                      const FixedConstants& consts, const SpatialGrid& grid,
                      const CellProfile& u0, const CellProfile& v0,
                      const SolverOptions& opts = {});

// Forward model bound to one experimental configuration. Works in
// dimensionless variables throughout; pure per call, safe for concurrent use.
class ForwardModel {
public:
  ForwardModel(const FixedConstants& consts, const SpatialGrid& grid, const CellProfile& u0,
               const CellProfile& v0, const CalibrationParameters& reference,
               const SolverOptions& opts = {});

  // u/c_sat at t = T, sampled at nondimensional coordinates xq in [0, 1]
  Eigen::VectorXd eta_nondim(const ScaledTheta& st, const Eigen::VectorXd& xq_nondim,
                             SolveStats* stats = nullptr) const;
  // same, with theta given as multipliers of the reference's dimensionless groups
  Eigen::VectorXd eta_from_multipliers(const Eigen::Vector4d& m,
                                       const Eigen::VectorXd& xq_nondim,
                                       SolveStats* stats = nullptr) const;
  ScaledTheta scale_multipliers(const Eigen::Vector4d& m) const;

  const FixedConstants& constants() const { return consts_; }
  const SpatialGrid& grid() const { return grid_; }
  const CalibrationParameters& reference() const { return ref_; }
  const SolverOptions& options() const { return opts_; }

private:
  FixedConstants consts_;
  SpatialGrid grid_;
  CalibrationParameters ref_;
  SolverOptions opts_;
  ScaledTheta st_ref_;
  ScaledConstants sc_;
  Eigen::VectorXd u0_nd_, v0_nd_;  // initial data on the grid, nondimensional
};

namespace detail {
// dimensionless semi-discrete system, exposed for verification; state layout
// y[3i..3i+2] = (u_i, v_i, w_i)
void rhs_nd(const ScaledTheta& st, const ScaledConstants& sc, int n, const Eigen::VectorXd& y,
            Eigen::VectorXd& f);
void jacobian_nd(const ScaledTheta& st, const ScaledConstants& sc, int n, const Eigen::VectorXd& y,
                 std::vector<Eigen::Matrix3d>& sub, std::vector<Eigen::Matrix3d>& diag,
                 std::vector<Eigen::Matrix3d>& sup);
}  // namespace detail

}  // namespace gbmcal

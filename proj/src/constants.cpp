#include "gbmcal/constants.hpp"

#include <stdexcept>
#include <string>

namespace gbmcal {

namespace {
void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be strictly positive, got " +
                                std::to_string(v));
  }
}
}  // namespace

void FixedConstants::validate() const {
  require_positive(D_n, "D_n");
  require_positive(D_O2, "D_O2");
  require_positive(tau_d, "tau_d");
  require_positive(alpha, "alpha");
  require_positive(c_sat, "c_sat");
  require_positive(h2, "h2");
  require_positive(dh2, "dh2");
  require_positive(k_m, "k_m");
  require_positive(w0, "w0");
  require_positive(L, "L");
  require_positive(T_horizon, "T_horizon");
}

void CalibrationParameters::validate() const {
  require_positive(tau_n, "tau_n");
  require_positive(chi, "chi");
  require_positive(b, "b");
  require_positive(j, "j");
}

ScaledTheta nondimensionalize(const CalibrationParameters& theta, const FixedConstants& c) {
  const double T = c.T_horizon;
  const double L2 = c.L * c.L;
  return {T / theta.tau_n, theta.chi * c.w0 * T / L2, theta.b * c.w0, theta.j * c.L / T};
}

CalibrationParameters dimensionalize(const ScaledTheta& s, const FixedConstants& c) {
  const double T = c.T_horizon;
  const double L2 = c.L * c.L;
  return {T / s.rho_n, s.chi * L2 / (c.w0 * T), s.b / c.w0, s.j * T / c.L};
}

ScaledConstants scale_constants(const FixedConstants& c) {
  const double T = c.T_horizon;
  const double L2 = c.L * c.L;
  return {c.D_n * T / L2,  c.D_O2 * T / L2, c.alpha * c.c_sat * T / c.w0,
          T / c.tau_d,     c.h2 / c.w0,     c.dh2 / c.w0,
          c.k_m / c.w0};
}

CalibrationParameters default_reference_theta() {
  return {7.5e5, 7.5e-9, 0.14, 1.0e6};
}

CalibrationParameters theta_from_multipliers(const Eigen::Vector4d& m,
                                             const CalibrationParameters& ref) {
  // multipliers act on the dimensionless groups; tau_n enters through the
  // rate rho_n = T/tau_n, so its multiplier inverts
  return {ref.tau_n / m[0], m[1] * ref.chi, m[2] * ref.b, m[3] * ref.j};
}

Eigen::Vector4d multipliers_from_theta(const CalibrationParameters& theta,
                                       const CalibrationParameters& ref) {
  return {ref.tau_n / theta.tau_n, theta.chi / ref.chi, theta.b / ref.b, theta.j / ref.j};
}

}  // namespace gbmcal

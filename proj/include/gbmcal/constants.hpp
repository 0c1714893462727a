#pragma once

#include <Eigen/Dense>

namespace gbmcal {

// Literature-fixed model constants, physical units.
struct FixedConstants {
  double D_n = 0.0;        // pedesis diffusivity [cm^2/s]
  double D_O2 = 1e-5;      // oxygen diffusivity [cm^2/s]
  double tau_d = 0.0;      // death characteristic time [s]
  double alpha = 0.0;      // oxygen consumption rate [mmHg cm/(cell s)]
  double c_sat = 0.0;      // saturation cell density [cell/cm]
  double h2 = 0.0;         // anoxia threshold [mmHg]
  double dh2 = 0.0;        // anoxia sensitivity [mmHg]
  double k_m = 2.5;        // Michaelis-Menten constant [mmHg]
  double w0 = 0.0;         // ambient oxygen [mmHg]
  double L = 2.0;          // chamber length [cm]
  double T_horizon = 0.0;  // experiment horizon [s]

  void validate() const;  // throws std::invalid_argument on nonpositive fields
};

// The unknown vector theta, physical units.
struct CalibrationParameters {
  double tau_n = 0.0;  // proliferation characteristic time [s]
  double chi = 0.0;    // chemotaxis coefficient [cm^2/(mmHg s)]
  double b = 0.0;      // inverse hypoxia threshold [1/mmHg]
  double j = 0.0;      // boundary flux proportionality [s/cm]

  void validate() const;

  Eigen::Vector4d as_vector() const { return {tau_n, chi, b, j}; }
  static CalibrationParameters from_vector(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
};

// Dimensionless image of theta under x* = x/L, t* = t/T, u* = u/c_sat, w* = w/w0.
struct ScaledTheta {
  double rho_n;  // T/tau_n
  double chi;    // chi * w0 * T / L^2
  double b;      // b * w0
  double j;      // j * L / T
};

// Dimensionless groups of the fixed constants.
struct ScaledConstants {
  double D_n;    // D_n * T / L^2
  double D_O2;   // D_O2 * T / L^2
  double alpha;  // alpha * c_sat * T / w0
  double rho_d;  // T/tau_d
  double h2;     // h2 / w0
  double dh2;    // dh2 / w0
  double k_m;    // k_m / w0
};

ScaledTheta nondimensionalize(const CalibrationParameters& theta, const FixedConstants& c);
CalibrationParameters dimensionalize(const ScaledTheta& s, const FixedConstants& c);
ScaledConstants scale_constants(const FixedConstants& c);

// Nominal reference parameter set used as the anchor of the design box.
CalibrationParameters default_reference_theta();

// Sampler-facing coordinates: multipliers of the reference's dimensionless
// groups (rho_n, chi*, b*, j*). Component 0 therefore scales 1/tau_n.
CalibrationParameters theta_from_multipliers(const Eigen::Vector4d& m,
                                             const CalibrationParameters& ref);
Eigen::Vector4d multipliers_from_theta(const CalibrationParameters& theta,
                                       const CalibrationParameters& ref);

}  // namespace gbmcal

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gbmcal/constants.hpp"

namespace gbmcal {

// The four calibration procedures: direct inference, surrogate, discrepancy,
// and surrogate plus discrepancy.
enum class CalibrationMode { BI, BCE, BCD, BCED };

std::string mode_name(CalibrationMode m);
CalibrationMode mode_from_string(const std::string& s);
bool mode_uses_surrogate(CalibrationMode m);
bool mode_uses_discrepancy(CalibrationMode m);

// Sampler coordinate kinds. Theta components are multipliers of the
// reference's dimensionless groups (tau_n enters through its rate, so its
// natural value is ref/m); positive scale parameters are sampled in log space.
enum class ParamKind { RateMultiplier, LinearMultiplier, LogScale };

struct ParamSpec {
  std::string name;
  ParamKind kind;
};

// Packing order per mode: theta first, then surrogate hypers, then
// discrepancy hypers, then sigma.
std::vector<ParamSpec> mode_params(CalibrationMode m);

// natural (reporting) value of one sampler coordinate
double natural_value(double coord, const ParamSpec& spec, const CalibrationParameters& ref);
Eigen::VectorXd natural_values(const Eigen::VectorXd& packed, const std::vector<ParamSpec>& specs,
                               const CalibrationParameters& ref);

std::string param_kind_name(ParamKind k);
ParamKind param_kind_from_string(const std::string& s);

}  // namespace gbmcal

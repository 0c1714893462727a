#include "gbmcal/mode.hpp"

#include <cmath>
#include <stdexcept>

namespace gbmcal {

std::string mode_name(CalibrationMode m) {
  switch (m) {
    case CalibrationMode::BI: return "bi";
    case CalibrationMode::BCE: return "bce";
    case CalibrationMode::BCD: return "bcd";
    case CalibrationMode::BCED: return "bced";
  }
  throw std::logic_error("mode_name: bad mode");
}

CalibrationMode mode_from_string(const std::string& s) {
  if (s == "bi") return CalibrationMode::BI;
  if (s == "bce") return CalibrationMode::BCE;
  if (s == "bcd") return CalibrationMode::BCD;
  if (s == "bced") return CalibrationMode::BCED;
  throw std::invalid_argument("unknown calibration mode '" + s + "' (expected bi|bce|bcd|bced)");
}

bool mode_uses_surrogate(CalibrationMode m) {
  return m == CalibrationMode::BCE || m == CalibrationMode::BCED;
}

bool mode_uses_discrepancy(CalibrationMode m) {
  return m == CalibrationMode::BCD || m == CalibrationMode::BCED;
}

std::vector<ParamSpec> mode_params(CalibrationMode m) {
  std::vector<ParamSpec> p = {{"tau_n", ParamKind::RateMultiplier},
                              {"chi", ParamKind::LinearMultiplier},
                              {"b", ParamKind::LinearMultiplier},
                              {"j", ParamKind::LinearMultiplier}};
  if (mode_uses_surrogate(m)) {
    p.push_back({"beta_x", ParamKind::LogScale});
    p.push_back({"beta_theta", ParamKind::LogScale});
    p.push_back({"lambda_x", ParamKind::LogScale});
  }
  if (mode_uses_discrepancy(m)) {
    p.push_back({"beta_d", ParamKind::LogScale});
    p.push_back({"lambda_d", ParamKind::LogScale});
  }
  p.push_back({"sigma", ParamKind::LogScale});
  return p;
}

double natural_value(double coord, const ParamSpec& spec, const CalibrationParameters& ref) {
  switch (spec.kind) {
    case ParamKind::LogScale:
      return std::exp(coord);
    case ParamKind::RateMultiplier:
      return ref.tau_n / coord;
    case ParamKind::LinearMultiplier:
      if (spec.name == "chi") return coord * ref.chi;
      if (spec.name == "b") return coord * ref.b;
      if (spec.name == "j") return coord * ref.j;
      return coord;
  }
  throw std::logic_error("natural_value: bad kind");
}

Eigen::VectorXd natural_values(const Eigen::VectorXd& packed, const std::vector<ParamSpec>& specs,
                               const CalibrationParameters& ref) {
  if (packed.size() != static_cast<Eigen::Index>(specs.size())) {
    throw std::invalid_argument("natural_values: dimension mismatch");
  }
  Eigen::VectorXd out(packed.size());
  for (Eigen::Index i = 0; i < packed.size(); ++i) {
    out[i] = natural_value(packed[i], specs[i], ref);
  }
  return out;
}

std::string param_kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::RateMultiplier: return "rate_multiplier";
    case ParamKind::LinearMultiplier: return "linear_multiplier";
    case ParamKind::LogScale: return "log_scale";
  }
  throw std::logic_error("param_kind_name: bad kind");
}

ParamKind param_kind_from_string(const std::string& s) {
  if (s == "rate_multiplier") return ParamKind::RateMultiplier;
  if (s == "linear_multiplier") return ParamKind::LinearMultiplier;
  if (s == "log_scale") return ParamKind::LogScale;
  throw std::invalid_argument("unknown parameter kind '" + s + "'");
}

}  // namespace gbmcal

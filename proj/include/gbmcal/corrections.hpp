#pragma once

#include <algorithm>
#include <cmath>

namespace gbmcal {

// Nonlinear correction factors of the cell model. All are pure formulas and
// unit-agnostic: pass consistent units (physical or scaled) for value and
// threshold. Crowding factors may go negative on transient overshoot; the
// solver clamps them where the physics requires it.

// F_gr: space limitation on proliferation, 1 - (u+v)/c_sat
inline double growth_saturation(double u, double v, double c_sat) {
  return 1.0 - (u + v) / c_sat;
}

// F_go: space limitation on migration, 1 - u/c_sat
inline double migration_saturation(double u, double c_sat) {
  return 1.0 - u / c_sat;
}

// Pi_gr: oxygen gate on proliferation; b is the inverse hypoxia threshold
inline double pi_grow(double w, double b) {
  return std::min(w * b, 1.0);
}

// Pi_go: oxygen gate on migration; complements pi_grow on [0, 1/b]
inline double pi_go(double w, double b) {
  return std::max(1.0 - w * b, 0.0);
}

// Pi_d: death activation, 0.5 * (1 - tanh((w - h2)/dh2))
inline double pi_death(double w, double h2, double dh2) {
  return 0.5 * (1.0 - std::tanh((w - h2) / dh2));
}

// Pi_c: Michaelis-Menten consumption kinetics, w/(w + k_m)
inline double pi_consumption(double w, double k_m) {
  return w / (w + k_m);
}

}  // namespace gbmcal

#include "gbmcal/pde.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gbmcal/corrections.hpp"

namespace gbmcal {
namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Eigen::VectorXd;

// Dimensionless coefficient set on [0,1]x[0,1] with u,v in units of c_sat
// and w in units of w0. State layout: y[3i..3i+2] = (u_i, v_i, w_i).
struct Sys {
  double Dn, chi, rho_n, rho_d, DO2, alpha, b, j, h2, dh2, km;
  int n;
  double h;
};

Sys make_sys(const ScaledTheta& st, const ScaledConstants& sc, int n) {
  return {sc.D_n, st.chi, st.rho_n, sc.rho_d, sc.D_O2, sc.alpha,
          st.b,   st.j,   sc.h2,    sc.dh2,   sc.k_m,  n,       1.0 / (n - 1)};
}

inline int iu(int i) { return 3 * i; }
inline int iv(int i) { return 3 * i + 1; }
inline int iw(int i) { return 3 * i + 2; }

// Face fluxes f_u at the n-1 midpoints, then cell divergences. Crowding
// factors are clamped at zero so transient overshoot cannot flip signs.
// Never throws: step attempts may pass non-finite trial states through here.
void rhs(const Sys& s, const VectorXd& y, VectorXd& f, VectorXd& fu) {
  const int n = s.n;
  const double h = s.h;
  for (int i = 0; i < n - 1; ++i) {
    const double ua = y[iu(i)], ub = y[iu(i + 1)];
    const double wa = y[iw(i)], wb = y[iw(i + 1)];
    const double um = 0.5 * (ua + ub);
    const double wm = 0.5 * (wa + wb);
    const double gw = (wb - wa) / h;
    const double fgo = std::max(migration_saturation(um, 1.0), 0.0);
    const double pgo = pi_go(wm, s.b);
    fu[i] = s.Dn * (ub - ua) / h - s.chi * fgo * pgo * um * gw;
  }
  const double inv_half_h = 2.0 / h;
  for (int i = 0; i < n; ++i) {
    const double u = y[iu(i)], v = y[iv(i)], w = y[iw(i)];
    const double pid = pi_death(w, s.h2, s.dh2);
    const double fgr = std::max(growth_saturation(u, v, 1.0), 0.0);
    const double pgr = std::clamp(w * s.b, 0.0, 1.0);
    const double react_u = s.rho_n * fgr * pgr * u - s.rho_d * pid * u;
    double div;
    if (i == 0) {
      div = (fu[0] - u / s.j) * inv_half_h;  // boundary flux from u - j f_u = 0
    } else if (i == n - 1) {
      div = (-u / s.j - fu[n - 2]) * inv_half_h;  // from u + j f_u = 0
    } else {
      div = (fu[i] - fu[i - 1]) / h;
    }
    f[iu(i)] = div + react_u;
    f[iv(i)] = s.rho_d * pid * u;
    if (i == 0 || i == n - 1) {
      f[iw(i)] = 0.0;  // Dirichlet w = w0; initial data already sits there
    } else {
      const double wc = std::max(w, 0.0);
      f[iw(i)] = s.DO2 * (y[iw(i + 1)] - 2.0 * w + y[iw(i - 1)]) / (h * h) -
                 s.alpha * pi_consumption(wc, s.km) * u;
    }
  }
}

// Analytic block-tridiagonal Jacobian of rhs(); branch derivatives follow
// the active clamp branches exactly.
void jacobian(const Sys& s, const VectorXd& y, std::vector<Matrix3d>& sub,
              std::vector<Matrix3d>& diag, std::vector<Matrix3d>& sup) {
  const int n = s.n;
  const double h = s.h;
  for (int i = 0; i < n; ++i) {
    sub[i].setZero();
    diag[i].setZero();
    sup[i].setZero();
  }

  // face contributions; dfu[.]/d(u_i, u_i+1, w_i, w_i+1)
  for (int i = 0; i < n - 1; ++i) {
    const double ua = y[iu(i)], ub = y[iu(i + 1)];
    const double wa = y[iw(i)], wb = y[iw(i + 1)];
    const double um = 0.5 * (ua + ub);
    const double wm = 0.5 * (wa + wb);
    const double gw = (wb - wa) / h;
    const double fgo = std::max(1.0 - um, 0.0);
    const double dfgo = (1.0 - um > 0.0) ? -1.0 : 0.0;
    const double pgo = std::max(1.0 - wm * s.b, 0.0);
    const double dpgo = (1.0 - wm * s.b > 0.0) ? -s.b : 0.0;
    const double P = fgo * um;
    const double dP_dum = dfgo * um + fgo;
    const double dfu_dua = -s.Dn / h - s.chi * 0.5 * dP_dum * pgo * gw;
    const double dfu_dub = s.Dn / h - s.chi * 0.5 * dP_dum * pgo * gw;
    const double dfu_dwa = -s.chi * P * (0.5 * dpgo * gw - pgo / h);
    const double dfu_dwb = -s.chi * P * (0.5 * dpgo * gw + pgo / h);

    // left cell of the face: +fu / (cell width)
    const double wl = (i == 0) ? 0.5 * h : h;
    diag[i](0, 0) += dfu_dua / wl;
    diag[i](0, 2) += dfu_dwa / wl;
    sup[i](0, 0) += dfu_dub / wl;
    sup[i](0, 2) += dfu_dwb / wl;
    // right cell of the face: -fu / (cell width)
    const double wr = (i + 1 == n - 1) ? 0.5 * h : h;
    diag[i + 1](0, 0) -= dfu_dub / wr;
    diag[i + 1](0, 2) -= dfu_dwb / wr;
    sub[i + 1](0, 0) -= dfu_dua / wr;
    sub[i + 1](0, 2) -= dfu_dwa / wr;
  }
  // boundary outflux terms
  diag[0](0, 0) += (-1.0 / s.j) * (2.0 / h);
  diag[n - 1](0, 0) += (-1.0 / s.j) * (2.0 / h);

  for (int i = 0; i < n; ++i) {
    const double u = y[iu(i)], v = y[iv(i)], w = y[iw(i)];
    const double arg = (w - s.h2) / s.dh2;
    const double th = std::tanh(arg);
    const double pid = 0.5 * (1.0 - th);
    const double dpid = -0.5 * (1.0 - th * th) / s.dh2;
    const double fgr_raw = 1.0 - u - v;
    const double fgr = std::max(fgr_raw, 0.0);
    const double dfgr = (fgr_raw > 0.0) ? -1.0 : 0.0;
    const double wb_prod = w * s.b;
    const double pgr = std::clamp(wb_prod, 0.0, 1.0);
    const double dpgr = (wb_prod > 0.0 && wb_prod < 1.0) ? s.b : 0.0;

    diag[i](0, 0) += s.rho_n * pgr * (fgr + u * dfgr) - s.rho_d * pid;
    diag[i](0, 1) += s.rho_n * pgr * u * dfgr;
    diag[i](0, 2) += s.rho_n * fgr * u * dpgr - s.rho_d * u * dpid;

    diag[i](1, 0) = s.rho_d * pid;
    diag[i](1, 2) = s.rho_d * u * dpid;

    if (i > 0 && i < n - 1) {
      const double wc = std::max(w, 0.0);
      const double pic = wc / (wc + s.km);
      const double dpic = (w > 0.0) ? s.km / ((w + s.km) * (w + s.km)) : 0.0;
      diag[i](2, 2) = -2.0 * s.DO2 / (h * h) - s.alpha * u * dpic;
      diag[i](2, 0) = -s.alpha * pic;
      sub[i](2, 2) = s.DO2 / (h * h);
      sup[i](2, 2) = s.DO2 / (h * h);
    }
  }
}

// block-tridiagonal LU with 3x3 blocks (Thomas recursion)
struct BlockTriLU {
  std::vector<Eigen::PartialPivLU<Matrix3d>> lu;
  std::vector<Matrix3d> X;  // X[i] = Dt_i^{-1} C_i
  const std::vector<Matrix3d>* sub = nullptr;

  void factor(int n, const std::vector<Matrix3d>& A, const std::vector<Matrix3d>& D,
              const std::vector<Matrix3d>& C) {
    lu.resize(n);
    X.resize(n - 1);
    sub = &A;
    Matrix3d Dt = D[0];
    for (int i = 0;; ++i) {
      lu[i].compute(Dt);
      if (i == n - 1) break;
      X[i] = lu[i].solve(C[i]);
      Dt = D[i + 1] - A[i + 1] * X[i];
    }
  }

  void solve(int n, VectorXd& b) const {
    Vector3d prev = lu[0].solve(Vector3d(b.segment<3>(0)));
    b.segment<3>(0) = prev;
    for (int i = 1; i < n; ++i) {
      const Vector3d r = b.segment<3>(3 * i) - (*sub)[i] * prev;
      prev = lu[i].solve(r);
      b.segment<3>(3 * i) = prev;
    }
    for (int i = n - 2; i >= 0; --i) {
      b.segment<3>(3 * i) -= X[i] * b.segment<3>(3 * (i + 1));
    }
  }
};

struct Work {
  VectorXd fu, f0, f1, f2, k1, k2, k3, ytmp, y1;
  std::vector<Matrix3d> Jsub, Jdiag, Jsup, Wsub, Wdiag, Wsup;
  BlockTriLU blt;
  explicit Work(int n)
      : fu(n - 1), f0(3 * n), f1(3 * n), f2(3 * n), k1(3 * n), k2(3 * n), k3(3 * n),
        ytmp(3 * n), y1(3 * n), Jsub(n), Jdiag(n), Jsup(n), Wsub(n), Wdiag(n), Wsup(n) {}
};

void check_state(const VectorXd& y, int n, double t_nd) {
  static const char* fields[3] = {"u", "v", "w"};
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double val = y[3 * i + c];
      if (!std::isfinite(val)) {
        throw SolveError(std::string("non-finite state value at node ") + std::to_string(i) +
                             " (field " + fields[c] + ")",
                         t_nd);
      }
      if (val < -1e-3 || val > 1e2) {
        throw SolveError(std::string("density blowup at node ") + std::to_string(i) +
                             " (field " + fields[c] + " = " + std::to_string(val) + ")",
                         t_nd);
      }
    }
  }
}

// Adaptive Rosenbrock(2,3) pair, L-stable, one Jacobian and factorization
// per step, three backsolves. Steps land exactly on the output grid when a
// callback is installed, and always on t = 1.
void integrate(const Sys& s, VectorXd& y, const SolverOptions& opts,
               const std::function<void(int, const VectorXd&)>& on_output, SolveStats& stats) {
  const int n = s.n;
  const int N = 3 * n;
  const double d_gam = 1.0 / (2.0 + std::sqrt(2.0));
  const double e32 = 6.0 + std::sqrt(2.0);
  const int n_targets = on_output ? opts.n_out : 1;

  Work w(n);
  rhs(s, y, w.f0, w.fu);
  ++stats.rhs_evals;

  double t = 0.0;
  int target = 1;
  double t_target = static_cast<double>(target) / n_targets;

  // conservative first step from the weighted size of f0
  double r0 = 0.0;
  for (int i = 0; i < N; ++i) {
    r0 = std::max(r0, std::abs(w.f0[i]) / (opts.atol + opts.rtol * std::abs(y[i])));
  }
  double hstep = std::min(t_target, 0.01 / (r0 + 1e-8));
  hstep = std::max(hstep, 1e-12);

  bool jac_fresh = false;
  while (true) {
    if (stats.steps + stats.rejected > opts.max_steps) {
      throw SolveError("step limit exceeded", t);
    }
    bool hit = false;
    double h_used = hstep;
    if (t + h_used >= t_target - 1e-15) {
      h_used = t_target - t;
      hit = true;
    }

    if (!jac_fresh) {
      jacobian(s, y, w.Jsub, w.Jdiag, w.Jsup);
      ++stats.jac_evals;
      jac_fresh = true;
    }
    const double hd = h_used * d_gam;
    for (int i = 0; i < n; ++i) {
      w.Wsub[i] = -hd * w.Jsub[i];
      w.Wsup[i] = -hd * w.Jsup[i];
      w.Wdiag[i] = Matrix3d::Identity() - hd * w.Jdiag[i];
    }
    w.blt.factor(n, w.Wsub, w.Wdiag, w.Wsup);

    w.k1 = w.f0;
    w.blt.solve(n, w.k1);
    w.ytmp = y + (0.5 * h_used) * w.k1;
    rhs(s, w.ytmp, w.f1, w.fu);
    w.k2 = w.f1 - w.k1;
    w.blt.solve(n, w.k2);
    w.k2 += w.k1;
    w.y1 = y + h_used * w.k2;
    rhs(s, w.y1, w.f2, w.fu);
    stats.rhs_evals += 2;  // f1 and f2
    w.k3 = w.f2 - e32 * (w.k2 - w.f1) - 2.0 * (w.k1 - w.f0);
    w.blt.solve(n, w.k3);

    double errnorm = 0.0;
    for (int i = 0; i < N; ++i) {
      const double e = (h_used / 6.0) * (w.k1[i] - 2.0 * w.k2[i] + w.k3[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(w.y1[i]));
      errnorm = std::max(errnorm, std::abs(e) / sc);
    }
    if (!std::isfinite(errnorm)) errnorm = 1e12;

    if (errnorm <= 1.0) {
      ++stats.steps;
      t = hit ? t_target : t + h_used;
      y.swap(w.y1);
      w.f0.swap(w.f2);
      jac_fresh = false;
      check_state(y, n, t);
      if (hit) {
        if (on_output) on_output(target, y);
        if (target == n_targets) break;
        ++target;
        t_target = static_cast<double>(target) / n_targets;
      }
    } else {
      ++stats.rejected;
    }

    const double fac = 0.8 * std::pow(std::max(errnorm, 1e-12), -1.0 / 3.0);
    hstep = h_used * std::clamp(fac, 0.2, 5.0);
    if (hstep < 1e-14) throw SolveError("time step underflow", t);
  }
}

}  // namespace

void assemble_rhs(const StateSnapshot& state, const CalibrationParameters& theta,
                  const FixedConstants& consts, const SpatialGrid& grid, Eigen::VectorXd& dudt,
                  Eigen::VectorXd& dvdt, Eigen::VectorXd& dwdt) {
  grid.validate();
  const int n = grid.n_nodes;
  if (state.u.size() != n || state.v.size() != n || state.w.size() != n) {
    throw std::invalid_argument("assemble_rhs: state size does not match grid");
  }
  VectorXd y(3 * n);
  for (int i = 0; i < n; ++i) {
    y[iu(i)] = state.u[i] / consts.c_sat;
    y[iv(i)] = state.v[i] / consts.c_sat;
    y[iw(i)] = state.w[i] / consts.w0;
  }
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(y[3 * i + c])) {
        static const char* fields[3] = {"u", "v", "w"};
        throw SolveError(std::string("non-finite state value at node ") + std::to_string(i) +
                             " (field " + fields[c] + ")",
                         state.t);
      }
    }
  }
  const Sys s = make_sys(nondimensionalize(theta, consts), scale_constants(consts), n);
  VectorXd f(3 * n), fu(n - 1);
  rhs(s, y, f, fu);
  dudt.resize(n);
  dvdt.resize(n);
  dwdt.resize(n);
  const double cu = consts.c_sat / consts.T_horizon;
  const double cw = consts.w0 / consts.T_horizon;
  for (int i = 0; i < n; ++i) {
    dudt[i] = f[iu(i)] * cu;
    dvdt[i] = f[iv(i)] * cu;
    dwdt[i] = f[iw(i)] * cw;
  }
}

namespace {

VectorXd profile_on_grid(const CellProfile& p, const Eigen::VectorXd& x_grid, double scale) {
  if (p.x.size() == 0) return VectorXd::Zero(x_grid.size());
  if (p.x.size() != p.u.size()) throw std::invalid_argument("profile: x/u length mismatch");
  VectorXd out = interp_linear(p.x, p.u, x_grid);
  out /= scale;
  return out;
}

}  // namespace

ForwardResult solve_forward(const CalibrationParameters& theta, const FixedConstants& consts,
                            const SpatialGrid& grid, const CellProfile& u0, const CellProfile& v0,
                            const SolverOptions& opts, bool record_trajectory) {
  theta.validate();
  consts.validate();
  grid.validate();
  const int n = grid.n_nodes;
  const Sys s = make_sys(nondimensionalize(theta, consts), scale_constants(consts), n);

  VectorXd y(3 * n);
  const VectorXd u0g = profile_on_grid(u0, grid.x, consts.c_sat);
  const VectorXd v0g = profile_on_grid(v0, grid.x, consts.c_sat);
  if (u0g.minCoeff() < 0.0 || v0g.minCoeff() < 0.0) {
    throw std::invalid_argument("solve_forward: initial profiles must be nonnegative");
  }
  for (int i = 0; i < n; ++i) {
    y[iu(i)] = u0g[i];
    y[iv(i)] = v0g[i];
    y[iw(i)] = 1.0;
  }

  ForwardResult res;
  std::function<void(int, const VectorXd&)> cb;
  if (record_trajectory) {
    res.trajectory.reserve(opts.n_out);
    cb = [&](int k, const VectorXd& yk) {
      StateSnapshot snap;
      snap.t = consts.T_horizon * static_cast<double>(k) / opts.n_out;
      snap.u.resize(n);
      snap.v.resize(n);
      snap.w.resize(n);
      for (int i = 0; i < n; ++i) {
        snap.u[i] = yk[iu(i)] * consts.c_sat;
        snap.v[i] = yk[iv(i)] * consts.c_sat;
        snap.w[i] = yk[iw(i)] * consts.w0;
      }
      res.trajectory.push_back(std::move(snap));
    };
  }
  integrate(s, y, opts, cb, res.stats);

  res.final_state.t = consts.T_horizon;
  res.final_state.u.resize(n);
  res.final_state.v.resize(n);
  res.final_state.w.resize(n);
  for (int i = 0; i < n; ++i) {
    res.final_state.u[i] = y[iu(i)] * consts.c_sat;
    res.final_state.v[i] = y[iv(i)] * consts.c_sat;
    res.final_state.w[i] = y[iw(i)] * consts.w0;
  }
  return res;
}

CellProfile model_eta(const Eigen::VectorXd& x_query, const CalibrationParameters& theta,
                      const FixedConstants& consts, const SpatialGrid& grid,
                      const CellProfile& u0, const CellProfile& v0, const SolverOptions& opts) {
  for (Eigen::Index i = 0; i < x_query.size(); ++i) {
    if (x_query[i] < -1e-12 || x_query[i] > consts.L * (1.0 + 1e-12)) {
      throw std::invalid_argument("model_eta: query point outside [0, L]");
    }
  }
  const ForwardResult res = solve_forward(theta, consts, grid, u0, v0, opts, false);
  CellProfile out;
  out.x = x_query;
  out.u = interp_linear(grid.x, res.final_state.u, x_query);
  return out;
}

ForwardModel::ForwardModel(const FixedConstants& consts, const SpatialGrid& grid,
                           const CellProfile& u0, const CellProfile& v0,
                           const CalibrationParameters& reference, const SolverOptions& opts)
    : consts_(consts), grid_(grid), ref_(reference), opts_(opts) {
  consts_.validate();
  grid_.validate();
  ref_.validate();
  st_ref_ = nondimensionalize(ref_, consts_);
  sc_ = scale_constants(consts_);
  u0_nd_ = profile_on_grid(u0, grid_.x, consts_.c_sat);
  v0_nd_ = profile_on_grid(v0, grid_.x, consts_.c_sat);
  if (u0_nd_.minCoeff() < 0.0 || v0_nd_.minCoeff() < 0.0) {
    throw std::invalid_argument("ForwardModel: initial profiles must be nonnegative");
  }
}

ScaledTheta ForwardModel::scale_multipliers(const Eigen::Vector4d& m) const {
  return {m[0] * st_ref_.rho_n, m[1] * st_ref_.chi, m[2] * st_ref_.b, m[3] * st_ref_.j};
}

Eigen::VectorXd ForwardModel::eta_nondim(const ScaledTheta& st, const Eigen::VectorXd& xq_nondim,
                                         SolveStats* stats) const {
  const int n = grid_.n_nodes;
  const Sys s = make_sys(st, sc_, n);
  VectorXd y(3 * n);
  for (int i = 0; i < n; ++i) {
    y[iu(i)] = u0_nd_[i];
    y[iv(i)] = v0_nd_[i];
    y[iw(i)] = 1.0;
  }
  SolveStats local;
  integrate(s, y, opts_, nullptr, local);
  if (stats) *stats = local;

  VectorXd u_final(n);
  for (int i = 0; i < n; ++i) u_final[i] = y[iu(i)];
  VectorXd x_nd = grid_.x / consts_.L;
  return interp_linear(x_nd, u_final, xq_nondim);
}

Eigen::VectorXd ForwardModel::eta_from_multipliers(const Eigen::Vector4d& m,
                                                   const Eigen::VectorXd& xq_nondim,
                                                   SolveStats* stats) const {
  return eta_nondim(scale_multipliers(m), xq_nondim, stats);
}

namespace detail {

void rhs_nd(const ScaledTheta& st, const ScaledConstants& sc, int n, const VectorXd& y,
            VectorXd& f) {
  const Sys s = make_sys(st, sc, n);
  f.resize(3 * n);
  VectorXd fu(n - 1);
  rhs(s, y, f, fu);
}

void jacobian_nd(const ScaledTheta& st, const ScaledConstants& sc, int n, const VectorXd& y,
                 std::vector<Matrix3d>& sub, std::vector<Matrix3d>& diag,
                 std::vector<Matrix3d>& sup) {
  const Sys s = make_sys(st, sc, n);
  sub.resize(n);
  diag.resize(n);
  sup.resize(n);
  jacobian(s, y, sub, diag, sup);
}

}  // namespace detail

}  // namespace gbmcal

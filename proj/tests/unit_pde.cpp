#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbmcal/analysis.hpp"
#include "gbmcal/corrections.hpp"
#include "gbmcal/pde.hpp"
#include "gbmcal/rng.hpp"
#include "support/scenario.hpp"

using namespace gbmcal;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

StateSnapshot random_state(const FixedConstants& c, int n, uint64_t seed) {
  Rng rng(seed);
  StateSnapshot s;
  s.t = 0.0;
  s.u.resize(n);
  s.v.resize(n);
  s.w.resize(n);
  for (int i = 0; i < n; ++i) {
    s.u[i] = rng.uniform(0.0, 0.8) * c.c_sat;
    s.v[i] = rng.uniform(0.0, 0.2) * c.c_sat;
    s.w[i] = rng.uniform(0.05, 1.0) * c.w0;
  }
  return s;
}

}  // namespace

TEST_CASE("rhs: interior stencil matches a hand-evaluated flux difference") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta{6.0e5, 1.1e-8, 0.14, 1.3e6};
  const int n = 5;
  const SpatialGrid grid = SpatialGrid::uniform(n, c.L);
  const StateSnapshot s = random_state(c, n, 42);

  VectorXd du, dv, dw;
  assemble_rhs(s, theta, c, grid, du, dv, dw);

  // independent evaluation at node 2, nondimensional then rescaled
  const ScaledTheta st = nondimensionalize(theta, c);
  const ScaledConstants sc = scale_constants(c);
  const double h = 1.0 / (n - 1);
  auto un = [&](int i) { return s.u[i] / c.c_sat; };
  auto vn = [&](int i) { return s.v[i] / c.c_sat; };
  auto wn = [&](int i) { return s.w[i] / c.w0; };
  auto face = [&](int i) {
    const double um = 0.5 * (un(i) + un(i + 1));
    const double wm = 0.5 * (wn(i) + wn(i + 1));
    const double gw = (wn(i + 1) - wn(i)) / h;
    return sc.D_n * (un(i + 1) - un(i)) / h -
           st.chi * std::max(1.0 - um, 0.0) * std::max(1.0 - wm * st.b, 0.0) * um * gw;
  };
  const int i = 2;
  const double react = st.rho_n * std::max(1.0 - un(i) - vn(i), 0.0) *
                           std::min(wn(i) * st.b, 1.0) * un(i) -
                       sc.rho_d * pi_death(wn(i), sc.h2, sc.dh2) * un(i);
  const double du_expect = ((face(i) - face(i - 1)) / h + react) * c.c_sat / c.T_horizon;
  const double dv_expect =
      sc.rho_d * pi_death(wn(i), sc.h2, sc.dh2) * un(i) * c.c_sat / c.T_horizon;
  const double dw_expect = (sc.D_O2 * (wn(i + 1) - 2.0 * wn(i) + wn(i - 1)) / (h * h) -
                            sc.alpha * pi_consumption(wn(i), sc.k_m) * un(i)) *
                           c.w0 / c.T_horizon;

  CHECK(du[i] == doctest::Approx(du_expect).epsilon(1e-12));
  CHECK(dv[i] == doctest::Approx(dv_expect).epsilon(1e-12));
  CHECK(dw[i] == doctest::Approx(dw_expect).epsilon(1e-12));
}

TEST_CASE("rhs: empty culture and uniform oxygen") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta = default_reference_theta();
  const int n = 21;
  const SpatialGrid grid = SpatialGrid::uniform(n, c.L);

  StateSnapshot s;
  s.u = VectorXd::Zero(n);
  s.v = VectorXd::Zero(n);
  s.w.resize(n);
  for (int i = 0; i < n; ++i) s.w[i] = c.w0 * (0.5 + 0.3 * std::sin(3.0 * i));
  VectorXd du, dv, dw;
  assemble_rhs(s, theta, c, grid, du, dv, dw);
  CHECK(du.cwiseAbs().maxCoeff() == 0.0);
  CHECK(dv.cwiseAbs().maxCoeff() == 0.0);
  // oxygen: pure diffusion of w when u == 0
  const double h = grid.x[1] - grid.x[0];
  for (int i = 1; i < n - 1; ++i) {
    const double lap = c.D_O2 * (s.w[i + 1] - 2.0 * s.w[i] + s.w[i - 1]) / (h * h);
    CHECK(dw[i] == doctest::Approx(lap).epsilon(1e-10));
  }

  // uniform oxygen kills the chemotaxis term: rhs must match the chi -> 0 run
  StateSnapshot s2 = random_state(c, n, 7);
  s2.w.setConstant(c.w0);
  CalibrationParameters theta0 = theta;
  theta0.chi = 1e-300;
  VectorXd du1, dv1, dw1, du0, dv0, dw0;
  assemble_rhs(s2, theta, c, grid, du1, dv1, dw1);
  assemble_rhs(s2, theta0, c, grid, du0, dv0, dw0);
  CHECK((du1 - du0).cwiseAbs().maxCoeff() <= 1e-9 * du0.cwiseAbs().maxCoeff());
}

TEST_CASE("rhs: non-finite state names the offending node") {
  const FixedConstants c = testing::demo_constants();
  const SpatialGrid grid = SpatialGrid::uniform(9, c.L);
  StateSnapshot s = random_state(c, 9, 3);
  s.v[4] = std::nan("");
  VectorXd du, dv, dw;
  CHECK_THROWS_WITH_AS(assemble_rhs(s, default_reference_theta(), c, grid, du, dv, dw),
                       doctest::Contains("node 4"), SolveError);
}

TEST_CASE("analytic jacobian matches finite differences") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta{5.5e5, 1.4e-8, 0.2, 9.0e5};
  const ScaledTheta st = nondimensionalize(theta, c);
  const ScaledConstants sc = scale_constants(c);
  const int n = 7;
  Rng rng(11);
  VectorXd y(3 * n);
  for (int i = 0; i < n; ++i) {
    y[3 * i] = rng.uniform(0.05, 0.85);
    y[3 * i + 1] = rng.uniform(0.0, 0.1);
    y[3 * i + 2] = rng.uniform(0.05, 0.95);
  }

  std::vector<Eigen::Matrix3d> sub, diag, sup;
  detail::jacobian_nd(st, sc, n, y, sub, diag, sup);

  VectorXd f0;
  detail::rhs_nd(st, sc, n, y, f0);
  const double eps = 1e-7;
  MatrixXd J_fd = MatrixXd::Zero(3 * n, 3 * n);
  for (int col = 0; col < 3 * n; ++col) {
    VectorXd yp = y, ym = y;
    yp[col] += eps;
    ym[col] -= eps;
    VectorXd fp, fm;
    detail::rhs_nd(st, sc, n, yp, fp);
    detail::rhs_nd(st, sc, n, ym, fm);
    J_fd.col(col) = (fp - fm) / (2.0 * eps);
  }

  MatrixXd J_an = MatrixXd::Zero(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    J_an.block<3, 3>(3 * i, 3 * i) = diag[i];
    if (i > 0) J_an.block<3, 3>(3 * i, 3 * (i - 1)) = sub[i];
    if (i < n - 1) J_an.block<3, 3>(3 * i, 3 * (i + 1)) = sup[i];
  }
  const double scale = J_fd.cwiseAbs().maxCoeff();
  CHECK((J_an - J_fd).cwiseAbs().maxCoeff() <= 1e-5 * scale);
}

TEST_CASE("null dynamics: zero culture stays zero, oxygen stays ambient") {
  FixedConstants c = testing::demo_constants();
  c.alpha = 1e-300;
  c.tau_d = 1e300;
  CalibrationParameters theta{1e300, 1e-300, 0.14, 1e-9};  // j -> 0 is the Dirichlet limit
  const SpatialGrid grid = SpatialGrid::uniform(41, c.L);
  CellProfile u0;
  u0.x = grid.x;
  u0.u = VectorXd::Zero(41);
  const ForwardResult res = solve_forward(theta, c, grid, u0, {}, {});
  CHECK(res.final_state.u.cwiseAbs().maxCoeff() <= 1e-12 * c.c_sat);
  CHECK(res.final_state.v.cwiseAbs().maxCoeff() <= 1e-12 * c.c_sat);
  CHECK((res.final_state.w.array() - c.w0).abs().maxCoeff() <= 1e-9 * c.w0);
}

TEST_CASE("trajectory invariants on the demo scenario") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta = default_reference_theta();
  const SpatialGrid grid = SpatialGrid::uniform(60, c.L);
  const CellProfile u0 = testing::demo_u0(c);
  SolverOptions opts;
  const ForwardResult res = solve_forward(theta, c, grid, u0, {}, opts, true);
  REQUIRE(res.trajectory.size() == 100);

  const double atol_phys_u = opts.atol * c.c_sat;
  const double atol_phys_w = opts.atol * c.w0;
  VectorXd v_prev = VectorXd::Zero(60);
  for (const auto& snap : res.trajectory) {
    CHECK(snap.u.minCoeff() >= -10.0 * atol_phys_u);
    CHECK(snap.v.minCoeff() >= -10.0 * atol_phys_u);
    CHECK(snap.w.minCoeff() >= -10.0 * atol_phys_w);
    CHECK(snap.w.maxCoeff() <= c.w0 + 10.0 * atol_phys_w);  // maximum principle
    // dead cells only accumulate
    CHECK(((snap.v - v_prev).array() >= -1e-6 * c.c_sat).all());
    v_prev = snap.v;
  }
  // dead cells: v(x, T) >= v0(x) (zero here)
  CHECK(res.final_state.v.minCoeff() >= -1e-9 * c.c_sat);
  // the scenario actually exercises death and hypoxia
  CHECK(res.final_state.v.maxCoeff() > 1e-3 * c.c_sat);
  CHECK(res.final_state.w.minCoeff() < 1.0 / theta.b);
}

TEST_CASE("semi-discrete cell balance is exact") {
  // trapezoidal mass rate of (u + v) equals growth integral minus outflux
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta{6.0e5, 1.0e-8, 0.17, 8.0e5};
  const ScaledTheta st = nondimensionalize(theta, c);
  const ScaledConstants sc = scale_constants(c);
  const int n = 33;
  Rng rng(5);
  VectorXd y(3 * n);
  for (int i = 0; i < n; ++i) {
    y[3 * i] = rng.uniform(0.05, 0.8);
    y[3 * i + 1] = rng.uniform(0.0, 0.15);
    y[3 * i + 2] = rng.uniform(0.1, 1.0);
  }
  VectorXd f;
  detail::rhs_nd(st, sc, n, y, f);

  const double h = 1.0 / (n - 1);
  double mass_rate = 0.0, growth = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wgt = (i == 0 || i == n - 1) ? 0.5 * h : h;
    mass_rate += wgt * (f[3 * i] + f[3 * i + 1]);
    const double u = y[3 * i], v = y[3 * i + 1], w = y[3 * i + 2];
    growth += wgt * st.rho_n * std::max(1.0 - u - v, 0.0) * std::min(w * st.b, 1.0) * u;
  }
  const double outflux = y[0] / st.j + y[3 * (n - 1)] / st.j;
  CHECK(mass_rate == doctest::Approx(growth - outflux).epsilon(1e-12));
}

TEST_CASE("integrated cell balance along a solve") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta = default_reference_theta();
  const SpatialGrid grid = SpatialGrid::uniform(50, c.L);
  const CellProfile u0 = testing::demo_u0(c);
  SolverOptions opts;
  opts.n_out = 2000;  // fine sampling so the time quadrature does not dominate
  opts.rtol = 1e-8;
  opts.atol = 1e-11;
  const ForwardResult res = solve_forward(theta, c, grid, u0, {}, opts, true);

  const ScaledTheta st = nondimensionalize(theta, c);
  const int n = grid.n_nodes;
  const double h = 1.0 / (n - 1);

  auto mass = [&](const StateSnapshot& s) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      const double wgt = (i == 0 || i == n - 1) ? 0.5 * h : h;
      m += wgt * (s.u[i] + s.v[i]) / c.c_sat;
    }
    return m;
  };
  auto source = [&](const StateSnapshot& s) {
    double g = 0.0;
    for (int i = 0; i < n; ++i) {
      const double wgt = (i == 0 || i == n - 1) ? 0.5 * h : h;
      const double u = s.u[i] / c.c_sat, v = s.v[i] / c.c_sat, w = s.w[i] / c.w0;
      g += wgt * st.rho_n * std::max(1.0 - u - v, 0.0) * std::min(w * st.b, 1.0) * u;
    }
    g -= (s.u[0] / c.c_sat + s.u[n - 1] / c.c_sat) / st.j;
    return g;
  };

  // initial snapshot for the quadrature start
  StateSnapshot s0;
  s0.t = 0.0;
  s0.u = interp_linear(u0.x, u0.u, grid.x);
  s0.v = VectorXd::Zero(n);
  s0.w = VectorXd::Constant(n, c.w0);

  double integral = 0.0;
  const StateSnapshot* prev = &s0;
  for (const auto& snap : res.trajectory) {
    const double dt = (snap.t - prev->t) / c.T_horizon;
    integral += 0.5 * dt * (source(*prev) + source(snap));
    prev = &snap;
  }
  const double dmass = mass(res.final_state) - mass(s0);
  CHECK(dmass == doctest::Approx(integral).epsilon(1e-5));
}

TEST_CASE("spatial self-convergence of order ~2") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta = default_reference_theta();
  const CellProfile u0 = testing::demo_u0(c, 1001);
  SolverOptions opts;
  opts.rtol = 1e-8;
  opts.atol = 1e-11;

  auto final_profile = [&](int n) {
    const SpatialGrid g = SpatialGrid::uniform(n, c.L);
    const ForwardResult r = solve_forward(theta, c, g, u0, {}, opts);
    return CellProfile{g.x, r.final_state.u};
  };
  const CellProfile p50 = final_profile(50);
  const CellProfile p100 = final_profile(100);
  const CellProfile p200 = final_profile(200);

  const double e_coarse = profile_error(p100, p50, c.c_sat, c.L);
  const double e_fine = profile_error(p200, p100, c.c_sat, c.L);
  CHECK(e_fine < e_coarse);
  const double order = std::log2(e_coarse / e_fine);
  INFO("e(50,100) = " << e_coarse << ", e(100,200) = " << e_fine << ", order = " << order);
  CHECK(order >= 1.8);
}

TEST_CASE("model_eta interpolation identities and determinism") {
  const FixedConstants c = testing::demo_constants();
  const CalibrationParameters theta = default_reference_theta();
  const SpatialGrid grid = SpatialGrid::uniform(40, c.L);
  const CellProfile u0 = testing::demo_u0(c);

  const ForwardResult res = solve_forward(theta, c, grid, u0, {}, {});
  const CellProfile at_nodes = model_eta(grid.x, theta, c, grid, u0, {}, {});
  CHECK((at_nodes.u - res.final_state.u).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd mid(1);
  mid[0] = 0.5 * (grid.x[7] + grid.x[8]);
  const CellProfile at_mid = model_eta(mid, theta, c, grid, u0, {}, {});
  CHECK(at_mid.u[0] ==
        doctest::Approx(0.5 * (res.final_state.u[7] + res.final_state.u[8])).epsilon(1e-12));

  const CellProfile again = model_eta(grid.x, theta, c, grid, u0, {}, {});
  CHECK((again.u - at_nodes.u).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd outside(1);
  outside[0] = c.L * 1.5;
  CHECK_THROWS_AS(model_eta(outside, theta, c, grid, u0, {}, {}), std::invalid_argument);
}

TEST_CASE("negative initial data is rejected") {
  const FixedConstants c = testing::demo_constants();
  const SpatialGrid grid = SpatialGrid::uniform(20, c.L);
  CellProfile u0;
  u0.x = grid.x;
  u0.u = VectorXd::Constant(20, -1.0);
  CHECK_THROWS_AS(solve_forward(default_reference_theta(), c, grid, u0, {}, {}),
                  std::invalid_argument);
}

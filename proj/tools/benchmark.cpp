// Timing study: serial reference vs OpenMP paths of the ensemble sampler and
// the synthetic-dataset generator, plus per-mode posterior evaluation cost
// (the source of the surrogate speedup figures).

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gbmcal/analysis.hpp"
#include "gbmcal/calibration.hpp"
#include "gbmcal/design.hpp"
#include "gbmcal/pde.hpp"
#include "gbmcal/sampler.hpp"

using namespace gbmcal;
using Eigen::Vector4d;
using Eigen::VectorXd;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

FixedConstants bench_constants() {
  FixedConstants c;
  c.D_n = 2.0e-8;
  c.tau_d = 1.728e5;
  c.alpha = 2.2e-10;
  c.c_sat = 1.0e7;
  c.h2 = 2.5;
  c.dh2 = 0.75;
  c.w0 = 42.0;
  c.T_horizon = 3.456e5;
  return c;
}

CellProfile bench_u0(const FixedConstants& c) {
  CellProfile p;
  p.x = VectorXd::LinSpaced(201, 0.0, c.L);
  p.u.resize(p.x.size());
  for (Eigen::Index i = 0; i < p.x.size(); ++i) {
    const double xn = p.x[i] / c.L;
    p.u[i] = 0.9 * c.c_sat * std::exp(-std::pow((xn - 0.5) / 0.25, 2));
  }
  return p;
}

struct Bench {
  FixedConstants consts = bench_constants();
  SpatialGrid grid;
  CellProfile u0, v0;
  ForwardModel model;
  DataMoments moments;
  SyntheticDataset synth;

  explicit Bench(int n_nodes)
      : grid(SpatialGrid::uniform(n_nodes, bench_constants().L)),
        u0(bench_u0(consts)),
        model(consts, grid, u0, v0, default_reference_theta()) {
    const int M = 30;
    const VectorXd x_nd = VectorXd::LinSpaced(M, 0.02, 0.98);
    const Vector4d truth(1.3, 0.8, 1.1, 0.9);
    VectorXd z = model.eta_from_multipliers(truth, x_nd);
    Rng rng(7);
    for (int i = 0; i < M; ++i) z[i] += rng.normal(0.0, 0.05);
    moments = compute_data_moments(x_nd, z);

    DesignBox box;
    const SyntheticModelFn fn = [this](const Vector4d& m, const VectorXd& xq) {
      return model.eta_from_multipliers(m, xq);
    };
    synth = generate_synthetic(60, 200, box, x_nd, 11, fn, default_reference_theta(), 0);
  }
};

LogPosterior make_posterior(const Bench& b, CalibrationMode mode) {
  DesignBox box;
  EtaFn eta;
  if (mode == CalibrationMode::BI || mode == CalibrationMode::BCD) {
    const ForwardModel* mp = &b.model;
    const VectorXd x = b.moments.x_nd;
    eta = [mp, x](const Vector4d& m) { return mp->eta_from_multipliers(m, x); };
  }
  PriorSet priors = default_priors(b.moments, &b.synth, mode, box);
  return LogPosterior(mode, b.moments, std::move(priors), eta,
                      mode_uses_surrogate(mode) ? &b.synth : nullptr);
}

double time_posterior(const LogPosterior& post, int reps) {
  VectorXd x(post.dim());
  x.head<4>() = Vector4d(1.2, 0.9, 1.05, 1.1);
  for (int k = 4; k < post.dim(); ++k) x[k] = std::log(0.3);
  double sink = 0.0;
  post(x);  // warm up
  const double t0 = now_s();
  for (int r = 0; r < reps; ++r) sink += post(x + VectorXd::Constant(post.dim(), 1e-6 * r));
  const double dt = (now_s() - t0) / reps;
  if (!std::isfinite(sink)) std::cerr << "";
  return dt;
}

}  // namespace

int main(int argc, char** argv) {
  const int n_nodes = (argc > 1) ? std::atoi(argv[1]) : 100;
  std::cout << "benchmark at n_nodes = " << n_nodes << "\n";
#ifdef _OPENMP
  std::cout << "OpenMP threads available: " << omp_get_max_threads() << "\n";
#else
  std::cout << "built without OpenMP\n";
#endif
  Bench b(n_nodes);

  // forward solve cost
  {
    const VectorXd xq = b.moments.x_nd;
    SolveStats stats;
    const double t0 = now_s();
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      b.model.eta_from_multipliers(Vector4d(1.0 + 0.01 * r, 1.0, 1.0, 1.0), xq, &stats);
    }
    const double per = (now_s() - t0) / reps;
    std::cout << "forward solve: " << per * 1e3 << " ms (" << stats.steps << " steps, "
              << stats.rejected << " rejected)\n";
  }

  // per-mode posterior evaluation cost and surrogate speedups
  double t_bi = 0.0, t_bce = 0.0, t_bcd = 0.0, t_bced = 0.0;
  {
    const LogPosterior p_bi = make_posterior(b, CalibrationMode::BI);
    const LogPosterior p_bce = make_posterior(b, CalibrationMode::BCE);
    const LogPosterior p_bcd = make_posterior(b, CalibrationMode::BCD);
    const LogPosterior p_bced = make_posterior(b, CalibrationMode::BCED);
    t_bi = time_posterior(p_bi, 50);
    t_bcd = time_posterior(p_bcd, 50);
    t_bce = time_posterior(p_bce, 500);
    t_bced = time_posterior(p_bced, 500);
    std::cout << "posterior eval: bi " << t_bi * 1e3 << " ms, bcd " << t_bcd * 1e3
              << " ms, bce " << t_bce * 1e3 << " ms, bced " << t_bced * 1e3 << " ms\n";
    std::cout << "speedup bce/bi: " << t_bi / t_bce << "x, bced/bcd: " << t_bcd / t_bced
              << "x\n";
  }

  // ensemble stepping: serial reference vs OpenMP
  {
    const LogPosterior post = make_posterior(b, CalibrationMode::BI);
    const LogDensityFn fn = [&post](const VectorXd& x) { return post(x); };
    const Eigen::MatrixXd init =
        init_walkers(post.priors(), post.param_specs(), fn, 16, 3);
    EnsembleOptions opts;
    opts.n_steps = 30;
    opts.burn_in = 0.0;
    opts.seed = 3;

    opts.n_threads = 1;
    double t0 = now_s();
    const Chain serial = run_ensemble(fn, init, opts);
    const double t_serial = now_s() - t0;

    opts.n_threads = 0;
    t0 = now_s();
    const Chain par = run_ensemble(fn, init, opts);
    const double t_par = now_s() - t0;

    bool identical = serial.samples == par.samples;
    std::cout << "ensemble 30 steps x 16 walkers (bi): serial " << t_serial << " s, openmp "
              << t_par << " s, speedup " << t_serial / t_par << "x, identical results: "
              << (identical ? "yes" : "NO") << "\n";
  }

  // synthetic generation: serial vs OpenMP
  {
    DesignBox box;
    const VectorXd x_nd = b.moments.x_nd;
    const SyntheticModelFn fn = [&b](const Vector4d& m, const VectorXd& xq) {
      return b.model.eta_from_multipliers(m, xq);
    };
    double t0 = now_s();
    const SyntheticDataset s1 =
        generate_synthetic(40, 100, box, x_nd, 5, fn, default_reference_theta(), 1);
    const double t_serial = now_s() - t0;
    t0 = now_s();
    const SyntheticDataset s2 =
        generate_synthetic(40, 100, box, x_nd, 5, fn, default_reference_theta(), 0);
    const double t_par = now_s() - t0;
    const bool identical = (s1.y - s2.y).cwiseAbs().maxCoeff() == 0.0;
    std::cout << "synthetic 40 runs: serial " << t_serial << " s, openmp " << t_par
              << " s, speedup " << t_serial / t_par << "x, identical results: "
              << (identical ? "yes" : "NO") << "\n";
  }
  return 0;
}

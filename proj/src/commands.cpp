#include "gbmcal/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "gbmcal/analysis.hpp"
#include "gbmcal/calibration.hpp"
#include "gbmcal/design.hpp"
#include "gbmcal/io.hpp"
#include "gbmcal/pde.hpp"
#include "gbmcal/sampler.hpp"

namespace gbmcal {

namespace fs = std::filesystem;
using Eigen::Vector4d;
using Eigen::VectorXd;
using nlohmann::json;

void RunConfig::apply_preset() {
  if (preset != "desk" && preset != "paper") {
    throw std::invalid_argument("unknown preset '" + preset + "' (expected desk|paper)");
  }
  const bool paper = preset == "paper";
  if (n_nodes == 0) n_nodes = paper ? 100 : 50;
  if (n_samples == 0 || n_walkers == 0) {
    int samples = 0, walkers = 16;
    if (mode == "bi") samples = 8000;
    else if (mode == "bcd") samples = 20000;
    else if (mode == "bce") samples = 100000;
    else if (mode == "bced") { samples = 30000; walkers = 32; }
    else samples = 8000;
    if (!paper) samples /= 10;
    if (n_samples == 0) n_samples = samples;
    if (n_walkers == 0) n_walkers = walkers;
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path, const std::string& cli_set_keys) {
  const auto kv = read_keyvalue_file(path);
  std::set<std::string> cli_set;
  std::stringstream ss(cli_set_keys);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) cli_set.insert(tok);
  }
  auto want = [&](const std::string& key) { return kv.count(key) && !cli_set.count(key); };
  auto str = [&](const std::string& key) { return kv.at(key); };
  auto num = [&](const std::string& key) { return std::stod(kv.at(key)); };

  if (want("constants")) cfg.constants_path = str("constants");
  if (want("data")) cfg.data_path = str("data");
  if (want("u0")) cfg.u0_path = str("u0");
  if (want("v0")) cfg.v0_path = str("v0");
  if (want("synth")) cfg.synth_path = str("synth");
  if (want("chain")) cfg.chain_path = str("chain");
  if (want("out")) cfg.out_dir = str("out");
  if (want("mode")) cfg.mode = str("mode");
  if (want("preset")) cfg.preset = str("preset");
  if (want("seed")) cfg.seed = static_cast<uint64_t>(std::stoull(str("seed")));
  if (want("threads")) cfg.threads = static_cast<int>(num("threads"));
  if (want("n_nodes")) cfg.n_nodes = static_cast<int>(num("n_nodes"));
  if (want("rtol")) cfg.rtol = num("rtol");
  if (want("atol")) cfg.atol = num("atol");
  if (want("n_out")) cfg.n_out = static_cast<int>(num("n_out"));
  if (want("n_walkers")) cfg.n_walkers = static_cast<int>(num("n_walkers"));
  if (want("n_samples")) cfg.n_samples = static_cast<int>(num("n_samples"));
  if (want("burn_in")) cfg.burn_in = num("burn_in");
  if (want("stretch_a")) cfg.stretch_a = num("stretch_a");
  if (want("thin")) cfg.thin = static_cast<int>(num("thin"));
  if (want("chain_csv")) cfg.chain_csv = (str("chain_csv") == "true" || str("chain_csv") == "1");
  if (want("pool")) cfg.pool = static_cast<int>(num("pool"));
  if (want("keep")) cfg.keep = static_cast<int>(num("keep"));
  if (want("n_lhs")) cfg.n_lhs = static_cast<int>(num("n_lhs"));
  if (want("box_lo")) cfg.box_lo = num("box_lo");
  if (want("box_hi")) cfg.box_hi = num("box_hi");
  if (want("n_draws")) cfg.n_draws = static_cast<int>(num("n_draws"));
  if (want("ref_tau_n")) cfg.reference.tau_n = num("ref_tau_n");
  if (want("ref_chi")) cfg.reference.chi = num("ref_chi");
  if (want("ref_b")) cfg.reference.b = num("ref_b");
  if (want("ref_j")) cfg.reference.j = num("ref_j");
  if (want("tau_n") || want("chi") || want("b") || want("j")) {
    CalibrationParameters th = cfg.theta.value_or(cfg.reference);
    if (want("tau_n")) th.tau_n = num("tau_n");
    if (want("chi")) th.chi = num("chi");
    if (want("b")) th.b = num("b");
    if (want("j")) th.j = num("j");
    cfg.theta = th;
  }
}

namespace {

void require_input(const std::string& value, const std::string& key) {
  if (value.empty()) {
    throw std::invalid_argument("missing required input '" + key +
                                "' (set it in the config file or with --" + key + ")");
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  j["constants"] = c.constants_path;
  j["data"] = c.data_path;
  j["u0"] = c.u0_path;
  if (c.v0_path) j["v0"] = *c.v0_path;
  j["synth"] = c.synth_path;
  j["chain"] = c.chain_path;
  j["out"] = c.out_dir;
  j["mode"] = c.mode;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["n_nodes"] = c.n_nodes;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["n_out"] = c.n_out;
  j["n_walkers"] = c.n_walkers;
  j["n_samples"] = c.n_samples;
  j["burn_in"] = c.burn_in;
  j["stretch_a"] = c.stretch_a;
  j["thin"] = c.thin;
  j["pool"] = c.pool;
  j["keep"] = c.keep;
  j["n_lhs"] = c.n_lhs;
  j["box_lo"] = c.box_lo;
  j["box_hi"] = c.box_hi;
  j["n_draws"] = c.n_draws;
  j["reference"] = {{"tau_n", c.reference.tau_n},
                    {"chi", c.reference.chi},
                    {"b", c.reference.b},
                    {"j", c.reference.j}};
  return j;
}

struct LoadedInputs {
  FixedConstants consts;
  ExperimentalDataset data;
  SpatialGrid grid;
};

LoadedInputs load_inputs(const RunConfig& cfg, bool need_data) {
  require_input(cfg.constants_path, "constants");
  require_input(cfg.u0_path, "u0");
  if (need_data) require_input(cfg.data_path, "data");
  LoadedInputs in;
  in.consts = read_constants(cfg.constants_path);
  if (need_data) {
    in.data = load_experimental_dataset(cfg.data_path, cfg.u0_path, cfg.v0_path, in.consts);
  } else {
    const ProfileFile u0 = read_profile_csv(cfg.u0_path);
    in.data.u0 = u0.profile;
    if (u0.normalized) in.data.u0.u *= in.consts.c_sat;
    if (cfg.v0_path) {
      const ProfileFile v0 = read_profile_csv(*cfg.v0_path);
      in.data.v0 = v0.profile;
      if (v0.normalized) in.data.v0.u *= in.consts.c_sat;
    }
  }
  in.grid = SpatialGrid::uniform(cfg.n_nodes, in.consts.L);
  return in;
}

DataMoments moments_of(const ExperimentalDataset& data, const FixedConstants& consts) {
  return compute_data_moments(data.x / consts.L, data.z / consts.c_sat);
}

json summary_to_json(const PosteriorSummary& s) {
  json j;
  for (const auto& p : s.params) {
    j["params"][p.name] = {{"map", p.map},       {"mean", p.mean},   {"median", p.median},
                           {"lo95", p.lo95},     {"hi95", p.hi95}};
  }
  j["map_log_post"] = s.map_log_post;
  std::vector<std::vector<double>> corr;
  for (Eigen::Index i = 0; i < s.correlation.rows(); ++i) {
    corr.emplace_back(s.correlation.row(i).data(),
                      s.correlation.row(i).data() + s.correlation.cols());
  }
  j["correlation"] = corr;
  j["rhat"] = std::vector<double>(s.rhat.data(), s.rhat.data() + s.rhat.size());
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << '\n';
}

void write_xy_csv(const std::string& path, const std::string& header, const VectorXd& x,
                  const std::vector<const VectorXd*>& cols) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(12);
  f << header << '\n';
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    f << x[i];
    for (const auto* c : cols) f << ',' << (*c)[i];
    f << '\n';
  }
}

ForwardModel build_model(const LoadedInputs& in, const RunConfig& cfg) {
  SolverOptions opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  opts.n_out = cfg.n_out;
  return ForwardModel(in.consts, in.grid, in.data.u0, in.data.v0, cfg.reference, opts);
}

}  // namespace

int cmd_simulate(RunConfig cfg) {
  cfg.apply_preset();
  const LoadedInputs in = load_inputs(cfg, /*need_data=*/false);
  const CalibrationParameters theta = cfg.theta.value_or(cfg.reference);
  theta.validate();
  SolverOptions opts{cfg.rtol, cfg.atol, cfg.n_out, 5000000};

  fs::create_directories(cfg.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const ForwardResult res =
      solve_forward(theta, in.consts, in.grid, in.data.u0, in.data.v0, opts, true);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  CellProfile final_u{in.grid.x, res.final_state.u};
  write_profile_csv(cfg.out_dir + "/profile_final.csv", final_u, false);

  // eta at the requested coordinates when observations are configured
  if (!cfg.data_path.empty()) {
    const ProfileFile obs = read_profile_csv(cfg.data_path);
    CellProfile eta;
    eta.x = obs.profile.x;
    eta.u = interp_linear(in.grid.x, res.final_state.u, obs.profile.x);
    write_profile_csv(cfg.out_dir + "/profile_eta.csv", eta, false);
  }

  {
    std::ofstream f(cfg.out_dir + "/trajectory.csv");
    if (!f) throw std::runtime_error("cannot write trajectory.csv");
    f.precision(12);
    f << "t,x,u,v,w\n";
    for (const auto& snap : res.trajectory) {
      for (int i = 0; i < in.grid.n_nodes; ++i) {
        f << snap.t << ',' << in.grid.x[i] << ',' << snap.u[i] << ',' << snap.v[i] << ','
          << snap.w[i] << '\n';
      }
    }
  }

  json j;
  j["config"] = config_to_json(cfg);
  j["theta"] = {{"tau_n", theta.tau_n}, {"chi", theta.chi}, {"b", theta.b}, {"j", theta.j}};
  j["solver"] = {{"steps", res.stats.steps},
                 {"rejected", res.stats.rejected},
                 {"rhs_evals", res.stats.rhs_evals},
                 {"wall_s", wall}};
  j["snapshots"] = res.trajectory.size();
  write_json(cfg.out_dir + "/simulate.json", j);
  std::cout << "simulate: " << res.trajectory.size() << " snapshots, " << res.stats.steps
            << " steps, " << wall << " s -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_design(RunConfig cfg) {
  cfg.apply_preset();
  const LoadedInputs in = load_inputs(cfg, /*need_data=*/true);
  fs::create_directories(cfg.out_dir);

  const ExperimentalDataset selected = select_experimental_points(in.data, cfg.n_lhs, cfg.seed);
  CellProfile sel{selected.x, selected.z};
  write_profile_csv(cfg.out_dir + "/selected_points.csv", sel, false);

  const ForwardModel model = build_model(in, cfg);
  DesignBox box;
  box.lo.setConstant(cfg.box_lo);
  box.hi.setConstant(cfg.box_hi);
  const VectorXd x_design_nd = selected.x / in.consts.L;
  const SyntheticModelFn fn = [&model](const Vector4d& m, const VectorXd& xq) {
    return model.eta_from_multipliers(m, xq);
  };
  const auto t0 = std::chrono::steady_clock::now();
  const SyntheticDataset synth = generate_synthetic(cfg.pool, cfg.keep, box, x_design_nd,
                                                    cfg.seed, fn, cfg.reference, cfg.threads);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  synth.save(cfg.out_dir + "/synthetic.csv");

  json j;
  j["config"] = config_to_json(cfg);
  j["selected_points"] = static_cast<int>(selected.x.size());
  j["synthetic_records"] = synth.size();
  j["wall_s"] = wall;
  write_json(cfg.out_dir + "/design.json", j);
  std::cout << "design: " << selected.x.size() << " experimental points, " << synth.size()
            << " synthetic records (" << wall << " s) -> " << cfg.out_dir << "\n";
  return 0;
}

namespace {

struct PosteriorBundle {
  std::unique_ptr<LogPosterior> posterior;
  std::unique_ptr<ForwardModel> model;  // null for surrogate-only modes
  std::unique_ptr<SyntheticDataset> synth;
  DataMoments moments;
};

PosteriorBundle build_posterior(const RunConfig& cfg, const LoadedInputs& in) {
  PosteriorBundle b;
  b.moments = moments_of(in.data, in.consts);
  const CalibrationMode mode = mode_from_string(cfg.mode);

  if (mode_uses_surrogate(mode)) {
    require_input(cfg.synth_path, "synth");
    b.synth = std::make_unique<SyntheticDataset>(SyntheticDataset::load(cfg.synth_path));
  }
  EtaFn eta;
  if (mode == CalibrationMode::BI || mode == CalibrationMode::BCD) {
    b.model = std::make_unique<ForwardModel>(build_model(in, cfg));
    const ForwardModel* mp = b.model.get();
    const VectorXd x_nd = b.moments.x_nd;
    eta = [mp, x_nd](const Vector4d& m) { return mp->eta_from_multipliers(m, x_nd); };
  }
  DesignBox box;
  box.lo.setConstant(cfg.box_lo);
  box.hi.setConstant(cfg.box_hi);
  PriorSet priors = default_priors(b.moments, b.synth.get(), mode, box);
  b.posterior =
      std::make_unique<LogPosterior>(mode, b.moments, std::move(priors), eta, b.synth.get());
  return b;
}

}  // namespace

int cmd_calibrate(RunConfig cfg) {
  cfg.apply_preset();
  const LoadedInputs in = load_inputs(cfg, /*need_data=*/true);
  fs::create_directories(cfg.out_dir);
  PosteriorBundle b = build_posterior(cfg, in);
  const LogPosterior& post = *b.posterior;

  const LogDensityFn fn = [&post](const VectorXd& x) { return post(x); };

  // resume: continue the saved walker state on the original stream schedule
  Chain previous;
  bool resuming = false;
  Eigen::MatrixXd init;
  EnsembleOptions eopts;
  eopts.n_steps = cfg.n_samples;
  eopts.burn_in = cfg.burn_in;
  eopts.stretch_a = cfg.stretch_a;
  eopts.seed = cfg.seed;
  eopts.n_threads = cfg.threads;
  if (!cfg.resume_path.empty()) {
    previous = Chain::load(cfg.resume_path);
    if (previous.meta.mode != cfg.mode) {
      throw std::invalid_argument("resume: chain mode '" + previous.meta.mode +
                                  "' does not match --mode '" + cfg.mode + "'");
    }
    resuming = true;
    init.resize(previous.n_walkers, previous.n_params);
    for (int w = 0; w < previous.n_walkers; ++w) {
      init.row(w) = previous.walker_at(previous.n_steps - 1, w).transpose();
    }
    eopts.seed = previous.meta.seed;
    eopts.stretch_a = previous.meta.stretch_a;
    eopts.burn_in = 0.0;  // burn-in was paid by the original run
    eopts.rng_skip_steps = previous.meta.n_steps_total;
  } else {
    init = init_walkers(post.priors(), post.param_specs(), fn, cfg.n_walkers, cfg.seed);
  }

  const auto t0 = std::chrono::steady_clock::now();
  Chain chain;
  try {
    chain = run_ensemble(fn, init, eopts);
  } catch (const SamplerStuckError& e) {
    std::cerr << "calibrate: " << e.what() << "\n";
    return 2;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double iters_per_s = cfg.n_samples / wall;
  const double ms_per_step = 1000.0 * wall / cfg.n_samples;

  if (resuming) {
    Chain merged = previous;
    chain.meta.n_steps_total = cfg.n_samples;
    merged.append(chain);
    chain = std::move(merged);
    chain.meta.extra = nlohmann::json::object();
    chain.meta.param_names.clear();
    chain.meta.param_kinds.clear();
  }
  if (cfg.thin > 1) chain = chain.thinned(cfg.thin);

  chain.meta.mode = cfg.mode;
  for (const auto& s : post.param_specs()) {
    chain.meta.param_names.push_back(s.name);
    chain.meta.param_kinds.push_back(param_kind_name(s.kind));
  }
  chain.meta.extra["reference_theta"] = {{"tau_n", cfg.reference.tau_n},
                                         {"chi", cfg.reference.chi},
                                         {"b", cfg.reference.b},
                                         {"j", cfg.reference.j}};
  chain.meta.extra["standardization"] = {{"mean", b.moments.std_mean}, {"sd", b.moments.std_sd}};
  chain.meta.extra["config"] = config_to_json(cfg);
  chain.meta.extra["priors"] = post.priors().to_json();
  chain.save(cfg.out_dir + "/chain.bin");
  if (cfg.chain_csv) chain.export_csv(cfg.out_dir + "/chain.csv");

  const PosteriorSummary summary = summarize(chain);
  // results.json is reproducible byte for byte from (inputs, config, seed);
  // volatile wall-clock figures go to timing.json
  json j;
  j["config"] = config_to_json(cfg);
  j["priors"] = post.priors().to_json();
  j["standardization"] = {{"mean", b.moments.std_mean}, {"sd", b.moments.std_sd}};
  j["acceptance_mean"] = chain.acceptance.mean();
  j["acceptance"] =
      std::vector<double>(chain.acceptance.data(), chain.acceptance.data() + chain.n_walkers);
  j["summary"] = summary_to_json(summary);
  j["retained_steps"] = chain.n_steps;
  write_json(cfg.out_dir + "/results.json", j);
  json jt;
  jt["wall_s"] = wall;
  jt["iterations_per_s"] = iters_per_s;
  jt["ms_per_step"] = ms_per_step;
  jt["failed_evaluations"] = post.failed_evaluations();
  write_json(cfg.out_dir + "/timing.json", jt);

  std::cout << "calibrate[" << cfg.mode << "]: " << cfg.n_samples << " steps x "
            << cfg.n_walkers << " walkers in " << wall << " s (" << iters_per_s
            << " it/s, " << ms_per_step << " ms/step), mean acceptance "
            << chain.acceptance.mean() << " -> " << cfg.out_dir << "\n";
  if (chain.acceptance.mean() < 0.05) {
    std::cerr << "calibrate: acceptance ratio is small; consider narrowing the parameter "
                 "range or running longer\n";
  }
  return 0;
}

int cmd_analyze(RunConfig cfg) {
  cfg.apply_preset();
  require_input(cfg.chain_path, "chain");
  const Chain chain = Chain::load(cfg.chain_path);
  if (cfg.mode_explicit && chain.meta.mode != cfg.mode) {
    throw std::invalid_argument("analyze: chain was sampled in mode '" + chain.meta.mode +
                                "' but --mode says '" + cfg.mode + "'");
  }
  cfg.mode = chain.meta.mode;
  const LoadedInputs in = load_inputs(cfg, /*need_data=*/true);
  fs::create_directories(cfg.out_dir);
  const DataMoments moments = moments_of(in.data, in.consts);
  const CalibrationMode mode = mode_from_string(chain.meta.mode);

  const ForwardModel model = build_model(in, cfg);
  const PosteriorSummary summary = summarize(chain);

  // estimator profiles at the data coordinates, nondimensional
  const Vector4d m_map = summary.map_packed.head<4>();
  Vector4d m_mean;
  {
    // posterior mean in multiplier coordinates
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (int s = 0; s < chain.n_steps; ++s) {
      for (int w = 0; w < chain.n_walkers; ++w) {
        acc += chain.walker_at(s, w).head<4>();
      }
    }
    m_mean = acc / static_cast<double>(chain.n_retained_samples());
  }

  const CellProfile data_profile{moments.x_nd, moments.z_nd};
  auto e_of = [&](const VectorXd& eta_nd) {
    CellProfile pred{moments.x_nd, eta_nd};
    return profile_error(pred, data_profile, 1.0, 1.0);  // already nondimensional
  };

  json e_table;
  const VectorXd eta_map = model.eta_from_multipliers(m_map, moments.x_nd);
  e_table["map"] = e_of(eta_map);
  const VectorXd eta_mean = model.eta_from_multipliers(m_mean, moments.x_nd);
  e_table["mean"] = e_of(eta_mean);

  const VectorXd d = moments.z_nd - eta_map;
  write_xy_csv(cfg.out_dir + "/deviation.csv", "x_nd,d_nd", moments.x_nd, {&d});

  if (mode_uses_discrepancy(mode)) {
    const VectorXd xq = VectorXd::LinSpaced(cfg.n_band_points, 0.0, 1.0);
    const DiscrepancyCurve disc = reconstruct_discrepancy(chain, moments, model, xq);
    write_xy_csv(cfg.out_dir + "/discrepancy.csv", "x_nd,delta_mean_nd,delta_sd_nd", disc.x,
                 {&disc.mean, &disc.sd});
    // discrepancy-corrected prediction at the data coordinates
    const DiscrepancyCurve disc_at_data = reconstruct_discrepancy(chain, moments, model,
                                                                  moments.x_nd);
    const VectorXd corrected = eta_map + disc_at_data.mean;
    e_table["corrected"] = e_of(corrected);
  }
  if (mode_uses_surrogate(mode)) {
    require_input(cfg.synth_path, "synth");
    const SyntheticDataset synth = SyntheticDataset::load(cfg.synth_path);
    const VectorXd xq = VectorXd::LinSpaced(cfg.n_band_points, 0.0, 1.0);
    const SurrogateCurve surro = surrogate_predict(chain, moments, synth, xq);
    write_xy_csv(cfg.out_dir + "/surrogate_curve.csv", "x_nd,mean_nd,sd_nd", surro.x_nd,
                 {&surro.mean_nd, &surro.sd_nd});
    const SurrogateCurve at_data = surrogate_predict(chain, moments, synth, moments.x_nd);
    e_table["surrogate"] = e_of(at_data.mean_nd);
  }
  if (mode == CalibrationMode::BI || mode == CalibrationMode::BCD) {
    const VectorXd xq = VectorXd::LinSpaced(cfg.n_band_points, 0.0, 1.0);
    const int n_draws = std::min<long>(cfg.n_draws, chain.n_retained_samples());
    const PredictiveBand band =
        predictive_band(chain, model, xq, static_cast<int>(n_draws), cfg.seed, cfg.threads);
    write_xy_csv(cfg.out_dir + "/band.csv", "x,mean,sd,lo,hi", band.x,
                 {&band.mean, &band.sd, &band.lo, &band.hi});
  }

  corner_export(chain, cfg.out_dir + "/corner");

  json j;
  j["config"] = config_to_json(cfg);
  j["mode"] = chain.meta.mode;
  j["summary"] = summary_to_json(summary);
  j["e"] = e_table;
  j["acceptance_mean"] = chain.acceptance.mean();
  write_json(cfg.out_dir + "/analysis.json", j);
  std::cout << "analyze[" << chain.meta.mode << "]: e = " << e_table.dump() << " -> "
            << cfg.out_dir << "\n";
  return 0;
}

int cmd_predict(RunConfig cfg) {
  cfg.apply_preset();
  require_input(cfg.chain_path, "chain");
  const Chain chain = Chain::load(cfg.chain_path);
  cfg.mode = chain.meta.mode;
  const LoadedInputs in = load_inputs(cfg, /*need_data=*/false);
  fs::create_directories(cfg.out_dir);
  const ForwardModel model = build_model(in, cfg);
  const VectorXd xq = VectorXd::LinSpaced(cfg.n_band_points, 0.0, 1.0);
  const int n_draws = static_cast<int>(std::min<long>(cfg.n_draws, chain.n_retained_samples()));
  const PredictiveBand band = predictive_band(chain, model, xq, n_draws, cfg.seed, cfg.threads);
  write_xy_csv(cfg.out_dir + "/band.csv", "x,mean,sd,lo,hi", band.x,
               {&band.mean, &band.sd, &band.lo, &band.hi});
  json j;
  j["config"] = config_to_json(cfg);
  j["n_draws"] = n_draws;
  write_json(cfg.out_dir + "/predict.json", j);
  std::cout << "predict[" << chain.meta.mode << "]: " << n_draws << " draws -> " << cfg.out_dir
            << "/band.csv\n";
  return 0;
}

}  // namespace gbmcal

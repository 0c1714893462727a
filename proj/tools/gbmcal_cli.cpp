#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "gbmcal/commands.hpp"

using gbmcal::RunConfig;

namespace {

// shared flags; returns a closure that reports which keys the CLI actually set
void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "flat key=value configuration file");
  cmd->add_option("--constants", cfg.constants_path, "model constants file");
  cmd->add_option("--data", cfg.data_path, "observed profile CSV (x,u at t=T)");
  cmd->add_option("--u0", cfg.u0_path, "initial live-cell profile CSV");
  cmd->add_option("--v0", [&cfg](const std::vector<std::string>& v) {
        cfg.v0_path = v.front();
        return true;
      }, "initial dead-cell profile CSV");
  cmd->add_option("--synth", cfg.synth_path, "synthetic dataset CSV");
  cmd->add_option("--chain", cfg.chain_path, "chain file");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--mode", cfg.mode, "calibration mode: bi|bce|bcd|bced");
  cmd->add_option("--preset", cfg.preset, "desk|paper");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  cmd->add_option("--n-nodes", cfg.n_nodes, "spatial mesh nodes");
  cmd->add_option("--rtol", cfg.rtol, "solver relative tolerance");
  cmd->add_option("--atol", cfg.atol, "solver absolute tolerance");
  cmd->add_option("--n-walkers", cfg.n_walkers, "ensemble walkers");
  cmd->add_option("--n-samples", cfg.n_samples, "ensemble steps");
  cmd->add_option("--burn-in", cfg.burn_in, "burn-in fraction");
  cmd->add_option("--stretch-a", cfg.stretch_a, "stretch move scale");
  cmd->add_option("--thin", cfg.thin, "retain every k-th ensemble step");
  cmd->add_flag("--chain-csv", cfg.chain_csv, "also export the chain as CSV");
  cmd->add_option("--resume", cfg.resume_path, "continue sampling from a saved chain");
  cmd->add_option("--pool", cfg.pool, "synthetic simulation pool size");
  cmd->add_option("--keep", cfg.keep, "synthetic records to keep");
  cmd->add_option("--n-lhs", cfg.n_lhs, "stratified experimental points (plus 2 anchors)");
  cmd->add_option("--box-lo", cfg.box_lo, "design box lower multiplier");
  cmd->add_option("--box-hi", cfg.box_hi, "design box upper multiplier");
  cmd->add_option("--n-draws", cfg.n_draws, "posterior predictive draws");
  cmd->add_option("--ref-tau-n", cfg.reference.tau_n, "reference tau_n [s]");
  cmd->add_option("--ref-chi", cfg.reference.chi, "reference chi");
  cmd->add_option("--ref-b", cfg.reference.b, "reference b");
  cmd->add_option("--ref-j", cfg.reference.j, "reference j");
}

std::string cli_set_keys(const CLI::App* cmd) {
  // map long flag names back to config keys
  std::string keys;
  for (const auto* opt : cmd->get_options()) {
    if (opt->count() == 0) continue;
    std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames()[0];
    for (auto& c : name) {
      if (c == '-') c = '_';
    }
    if (name == "ref_tau_n") name = "ref_tau_n";
    if (!keys.empty()) keys += ',';
    keys += name;
  }
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glioblastoma progression model calibration toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  CLI::App* sim = app.add_subcommand("simulate", "run the forward model and emit profiles");
  sim->add_option("--tau-n", [&cfg](const std::vector<std::string>& v) {
        auto t = cfg.theta.value_or(cfg.reference);
        t.tau_n = std::stod(v.front());
        cfg.theta = t;
        return true;
      }, "proliferation time [s]");
  sim->add_option("--chi", [&cfg](const std::vector<std::string>& v) {
        auto t = cfg.theta.value_or(cfg.reference);
        t.chi = std::stod(v.front());
        cfg.theta = t;
        return true;
      }, "chemotaxis coefficient");
  sim->add_option("--b", [&cfg](const std::vector<std::string>& v) {
        auto t = cfg.theta.value_or(cfg.reference);
        t.b = std::stod(v.front());
        cfg.theta = t;
        return true;
      }, "inverse hypoxia threshold");
  sim->add_option("--j", [&cfg](const std::vector<std::string>& v) {
        auto t = cfg.theta.value_or(cfg.reference);
        t.j = std::stod(v.front());
        cfg.theta = t;
        return true;
      }, "boundary flux proportionality");
  CLI::App* des = app.add_subcommand("design", "select experimental points and build the synthetic dataset");
  CLI::App* cal = app.add_subcommand("calibrate", "run ensemble MCMC for the chosen mode");
  CLI::App* ana = app.add_subcommand("analyze", "summaries, bands, discrepancy and error table from a chain");
  CLI::App* pre = app.add_subcommand("predict", "posterior predictive band from a chain");
  for (CLI::App* c : {sim, des, cal, ana, pre}) add_common_flags(c, cfg, config_path);

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!config_path.empty()) gbmcal::apply_config_file(cfg, config_path, cli_set_keys(active));
    cfg.mode_explicit = active->count("--mode") > 0;
    if (active == sim) return gbmcal::cmd_simulate(cfg);
    if (active == des) return gbmcal::cmd_design(cfg);
    if (active == cal) return gbmcal::cmd_calibrate(cfg);
    if (active == ana) return gbmcal::cmd_analyze(cfg);
    if (active == pre) return gbmcal::cmd_predict(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

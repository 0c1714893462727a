#include "gbmcal/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gbmcal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr uint64_t kWalkerStreamSalt = 0x57414c4bULL;
constexpr uint64_t kInitStreamSalt = 0x494e4954ULL;
constexpr int kDrawsPerStep = 3;  // partner, stretch, accept
}  // namespace

std::vector<ParamSpec> ChainMeta::specs() const {
  std::vector<ParamSpec> out;
  for (size_t i = 0; i < param_names.size(); ++i) {
    out.push_back({param_names[i], param_kind_from_string(param_kinds[i])});
  }
  return out;
}

CalibrationParameters ChainMeta::reference() const {
  const auto& r = extra.at("reference_theta");
  return {r.at("tau_n").get<double>(), r.at("chi").get<double>(), r.at("b").get<double>(),
          r.at("j").get<double>()};
}

VectorXd Chain::walker_at(int s, int w) const {
  VectorXd out(n_params);
  for (int p = 0; p < n_params; ++p) out[p] = sample(s, w, p);
  return out;
}

StretchProposal stretch_move(const VectorXd& walker, const VectorXd& partner, double a, Rng& rng) {
  if (!(a > 1.0)) throw std::invalid_argument("stretch_move: a must be > 1");
  const double sa = std::sqrt(a);
  const double u = rng.uniform01();
  const double g = std::pow(1.0 / sa + u * (sa - 1.0 / sa), 2);
  StretchProposal prop;
  prop.y = partner + g * (walker - partner);
  prop.log_hastings = (static_cast<double>(walker.size()) - 1.0) * std::log(g);
  return prop;
}

MatrixXd init_walkers(const PriorSet& priors, const std::vector<ParamSpec>& specs,
                      const LogDensityFn& log_post, int n_walkers, uint64_t seed) {
  const int d = static_cast<int>(specs.size());
  MatrixXd init(n_walkers, d);
  Rng rng(seed, kInitStreamSalt);
  const long max_attempts = 100L * n_walkers;
  long attempts = 0;
  for (int w = 0; w < n_walkers; ++w) {
    for (;;) {
      if (++attempts > max_attempts) {
        throw std::runtime_error(
            "init_walkers: could not find walkers with finite log posterior after " +
            std::to_string(max_attempts) +
            " prior draws; revise the prior box or the dataset");
      }
      VectorXd x(d);
      for (int k = 0; k < d; ++k) {
        if (specs[k].kind == ParamKind::LogScale) {
          x[k] = std::log(priors.scale(specs[k].name).sample(rng));
        } else {
          x[k] = rng.uniform(priors.box.lo[k], priors.box.hi[k]);
        }
      }
      if (std::isfinite(log_post(x))) {
        init.row(w) = x.transpose();
        break;
      }
    }
  }
  return init;
}

namespace {

// one half-ensemble sweep; updates positions/logps/acc in place
void half_step(const LogDensityFn& log_post, MatrixXd& pos, VectorXd& logp,
               Eigen::VectorXi& acc, std::vector<Rng>& streams, int lo, int hi, int other_lo,
               int other_hi, double a, int n_threads) {
  const int other_n = other_hi - other_lo;
  const MatrixXd frozen = pos.middleRows(other_lo, other_n);  // snapshot of the other half
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_threads) if (n_threads > 1)
#endif
  for (int w = lo; w < hi; ++w) {
    Rng& rng = streams[w];
    // fixed draw order per step: partner, stretch factor, accept
    const int partner = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(other_n)));
    const double sa = std::sqrt(a);
    const double u = rng.uniform01();
    const double g = std::pow(1.0 / sa + u * (sa - 1.0 / sa), 2);
    const double u_acc = rng.uniform01();

    const VectorXd xk = pos.row(w).transpose();
    const VectorXd xj = frozen.row(partner).transpose();
    const VectorXd y = xj + g * (xk - xj);
    const double corr = (static_cast<double>(xk.size()) - 1.0) * std::log(g);
    const double lp_new = log_post(y);
    if (std::isfinite(lp_new) && std::log(u_acc) < corr + lp_new - logp[w]) {
      pos.row(w) = y.transpose();
      logp[w] = lp_new;
      acc[w] += 1;
    }
  }
}

}  // namespace

Chain run_ensemble(const LogDensityFn& log_post, const MatrixXd& init, const EnsembleOptions& opts) {
  const int n_walkers = static_cast<int>(init.rows());
  const int d = static_cast<int>(init.cols());
  if (n_walkers < 2) throw std::invalid_argument("run_ensemble: need at least 2 walkers");
  if (opts.n_steps < 1) throw std::invalid_argument("run_ensemble: need at least 1 step");
  if (!(opts.burn_in >= 0.0 && opts.burn_in < 1.0)) {
    throw std::invalid_argument("run_ensemble: burn_in must be in [0, 1)");
  }
  if (n_walkers < 2 * d) {
    std::cerr << "run_ensemble: warning: " << n_walkers << " walkers for " << d
              << " parameters; at least " << 2 * d << " recommended\n";
  }

  const int retained = static_cast<int>(std::floor((1.0 - opts.burn_in) * opts.n_steps));
  const int burn = opts.n_steps - retained;

#ifdef _OPENMP
  const int n_threads = (opts.n_threads > 0) ? opts.n_threads : omp_get_num_procs();
#else
  const int n_threads = 1;
#endif

  MatrixXd pos = init;
  VectorXd logp(n_walkers);
  bool bad_init = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_threads) if (n_threads > 1)
#endif
  for (int w = 0; w < n_walkers; ++w) {
    logp[w] = log_post(pos.row(w).transpose());
    if (!std::isfinite(logp[w])) bad_init = true;
  }
  if (bad_init) {
    throw std::invalid_argument("run_ensemble: initial walkers must have finite log posterior");
  }

  std::vector<Rng> streams;
  streams.reserve(n_walkers);
  for (int w = 0; w < n_walkers; ++w) {
    streams.emplace_back(opts.seed, kWalkerStreamSalt + static_cast<uint64_t>(w));
    for (long s = 0; s < opts.rng_skip_steps * kDrawsPerStep; ++s) streams[w].next_u64();
  }

  Eigen::VectorXi acc = Eigen::VectorXi::Zero(n_walkers);
  const int half = n_walkers / 2;  // first half [0, half), second [half, n)

  Chain chain;
  chain.n_steps = retained;
  chain.n_walkers = n_walkers;
  chain.n_params = d;
  chain.samples.resize(static_cast<size_t>(retained) * n_walkers * d);
  chain.log_post.resize(static_cast<size_t>(retained) * n_walkers);
  chain.meta.n_steps_total = opts.n_steps;
  chain.meta.burn_in = opts.burn_in;
  chain.meta.stretch_a = opts.stretch_a;
  chain.meta.seed = opts.seed;

  long last_accept_total = 0;
  int steps_since_accept = 0;
  for (int step = 0; step < opts.n_steps; ++step) {
    half_step(log_post, pos, logp, acc, streams, 0, half, half, n_walkers, opts.stretch_a,
              n_threads);
    half_step(log_post, pos, logp, acc, streams, half, n_walkers, 0, half, opts.stretch_a,
              n_threads);

    const long accept_total = acc.cast<long>().sum();
    steps_since_accept = (accept_total > last_accept_total) ? 0 : steps_since_accept + 1;
    last_accept_total = accept_total;
    if (steps_since_accept >= 500) {
      throw SamplerStuckError(
          "run_ensemble: no proposal accepted anywhere in the ensemble for 500 consecutive "
          "steps; the MCMC acceptance ratio is small, consider narrowing the parameter range "
          "or revising the priors");
    }

    if (step >= burn) {
      const int s = step - burn;
      for (int w = 0; w < n_walkers; ++w) {
        for (int p = 0; p < d; ++p) {
          chain.samples[(static_cast<size_t>(s) * n_walkers + w) * d + p] = pos(w, p);
        }
        chain.log_post[static_cast<size_t>(s) * n_walkers + w] = logp[w];
      }
    }
    if (opts.progress) {
      opts.progress(step + 1, static_cast<double>(acc.cast<long>().sum()) /
                                  (static_cast<double>(step + 1) * n_walkers));
    }
  }

  chain.acceptance = acc.cast<double>() / static_cast<double>(opts.n_steps);
  return chain;
}

// ---- persistence ----

namespace {
constexpr char kMagic[8] = {'G', 'B', 'C', 'H', 'N', '0', '1', '\0'};
}

void Chain::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  nlohmann::json hdr;
  hdr["mode"] = meta.mode;
  hdr["seed"] = meta.seed;
  hdr["burn_in"] = meta.burn_in;
  hdr["stretch_a"] = meta.stretch_a;
  hdr["n_steps_total"] = meta.n_steps_total;
  hdr["n_steps"] = n_steps;
  hdr["n_walkers"] = n_walkers;
  hdr["n_params"] = n_params;
  hdr["param_names"] = meta.param_names;
  hdr["param_kinds"] = meta.param_kinds;
  hdr["acceptance"] = std::vector<double>(acceptance.data(), acceptance.data() + acceptance.size());
  hdr["extra"] = meta.extra;
  const std::string hs = hdr.dump();
  const uint64_t hlen = hs.size();
  f.write(kMagic, 8);
  f.write(reinterpret_cast<const char*>(&hlen), 8);
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  f.write(reinterpret_cast<const char*>(samples.data()),
          static_cast<std::streamsize>(samples.size() * sizeof(double)));
  f.write(reinterpret_cast<const char*>(log_post.data()),
          static_cast<std::streamsize>(log_post.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write failed: " + path);
}

Chain Chain::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error(path + ": not a chain file");
  }
  uint64_t hlen = 0;
  f.read(reinterpret_cast<char*>(&hlen), 8);
  std::string hs(hlen, '\0');
  f.read(hs.data(), static_cast<std::streamsize>(hlen));
  const nlohmann::json hdr = nlohmann::json::parse(hs);

  Chain c;
  c.meta.mode = hdr.at("mode").get<std::string>();
  c.meta.seed = hdr.at("seed").get<uint64_t>();
  c.meta.burn_in = hdr.at("burn_in").get<double>();
  c.meta.stretch_a = hdr.at("stretch_a").get<double>();
  c.meta.n_steps_total = hdr.at("n_steps_total").get<long>();
  c.n_steps = hdr.at("n_steps").get<int>();
  c.n_walkers = hdr.at("n_walkers").get<int>();
  c.n_params = hdr.at("n_params").get<int>();
  c.meta.param_names = hdr.at("param_names").get<std::vector<std::string>>();
  c.meta.param_kinds = hdr.at("param_kinds").get<std::vector<std::string>>();
  const auto accv = hdr.at("acceptance").get<std::vector<double>>();
  c.acceptance = Eigen::Map<const VectorXd>(accv.data(), static_cast<Eigen::Index>(accv.size()));
  c.meta.extra = hdr.value("extra", nlohmann::json::object());

  c.samples.resize(static_cast<size_t>(c.n_steps) * c.n_walkers * c.n_params);
  c.log_post.resize(static_cast<size_t>(c.n_steps) * c.n_walkers);
  f.read(reinterpret_cast<char*>(c.samples.data()),
         static_cast<std::streamsize>(c.samples.size() * sizeof(double)));
  f.read(reinterpret_cast<char*>(c.log_post.data()),
         static_cast<std::streamsize>(c.log_post.size() * sizeof(double)));
  if (!f) throw std::runtime_error(path + ": truncated chain file");
  return c;
}

Chain Chain::thinned(int k) const {
  if (k <= 1) return *this;
  Chain out = *this;
  out.samples.clear();
  out.log_post.clear();
  out.n_steps = 0;
  for (int s = 0; s < n_steps; s += k) {
    for (int w = 0; w < n_walkers; ++w) {
      for (int p = 0; p < n_params; ++p) out.samples.push_back(sample(s, w, p));
      out.log_post.push_back(logp(s, w));
    }
    ++out.n_steps;
  }
  return out;
}

void Chain::append(const Chain& next) {
  if (next.n_walkers != n_walkers || next.n_params != n_params) {
    throw std::invalid_argument("Chain::append: walker/parameter layout mismatch");
  }
  samples.insert(samples.end(), next.samples.begin(), next.samples.end());
  log_post.insert(log_post.end(), next.log_post.begin(), next.log_post.end());
  n_steps += next.n_steps;
  const double w_old = static_cast<double>(meta.n_steps_total);
  const double w_new = static_cast<double>(next.meta.n_steps_total);
  acceptance = (acceptance * w_old + next.acceptance * w_new) / (w_old + w_new);
  meta.n_steps_total += next.meta.n_steps_total;
}

VectorXd chain_natural_row(const Chain& chain, int step, int walker) {
  const auto specs = chain.meta.specs();
  return natural_values(chain.walker_at(step, walker), specs, chain.meta.reference());
}

void Chain::export_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(12);
  f << "step,walker";
  for (const auto& n : meta.param_names) f << ',' << n;
  f << ",log_post\n";
  for (int s = 0; s < n_steps; ++s) {
    for (int w = 0; w < n_walkers; ++w) {
      const VectorXd nat = chain_natural_row(*this, s, w);
      f << s << ',' << w;
      for (Eigen::Index p = 0; p < nat.size(); ++p) f << ',' << nat[p];
      f << ',' << logp(s, w) << '\n';
    }
  }
}

}  // namespace gbmcal

#include "specmc/smc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace specmc {

namespace {

// substream roles
constexpr std::uint64_t kRoleInit = 1;
constexpr std::uint64_t kRoleChain = 2;
constexpr std::uint64_t kRoleResample = 3;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

void validate_smc_config(const SmcConfig& cfg) {
  if (cfg.T < 2) throw std::invalid_argument("smc: T must be >= 2");
  if (cfg.n < 1) throw std::invalid_argument("smc: n must be >= 1");
  if (cfg.T % cfg.n != 0) throw std::invalid_argument("smc: T must be divisible by n");
  if (cfg.T / cfg.n < 2) throw std::invalid_argument("smc: S = T/n must be >= 2");
  if (!(cfg.ess_target > 0.0 && cfg.ess_target < 1.0))
    throw std::invalid_argument("smc: ess_target must lie in (0, 1)");
  if (cfg.max_levels < 1) throw std::invalid_argument("smc: max_levels must be >= 1");
  if (cfg.workers < 0) throw std::invalid_argument("smc: workers must be >= 0");
}

ParticleEnsemble init_ensemble(const Problem& problem, const SmcConfig& cfg, ThreadPool& pool) {
  const Index T = cfg.T;
  const Index d = problem.dim();
  ParticleEnsemble ens;
  ens.stream_key = cfg.seed;
  ens.thetas.resize(d, T);
  ens.energies.resize(T);
  ens.log_weights = ArrayXd::Zero(T);
  const Rng base(cfg.seed);
  pool.for_blocks(T, [&](std::int64_t lo, std::int64_t hi) {
    auto ev = problem.make_evaluator();
    for (std::int64_t i = lo; i < hi; ++i) {
      Rng r = base.substream({kRoleInit, static_cast<std::uint64_t>(i)});
      VectorXd th = prior_sample(problem.params, r);
      ens.thetas.col(i) = th;
      ens.energies[i] = ev->full(th);
    }
  });
  return ens;
}

ArrayXd incremental_log_weights(const ParticleEnsemble& ens, double delta_beta, double n_data) {
  if (delta_beta == 0.0) return ArrayXd::Zero(ens.energies.size());
  ArrayXd w = -delta_beta * n_data * ens.energies;
  return w;
}

double ess(const ArrayXd& log_weights) {
  const double l1 = log_sum_exp(log_weights);
  if (l1 == -kInf) throw std::runtime_error("ess: total weight is zero");
  const double l2 = log_sum_exp(2.0 * log_weights);
  return std::exp(2.0 * l1 - l2);
}

double next_beta(const ArrayXd& energies, double n_data, double beta_prev, double ess_target) {
  if (!(beta_prev < 1.0)) throw std::invalid_argument("next_beta: beta_prev must be < 1");
  const double T = static_cast<double>(energies.size());
  // shift-invariant: subtract the finite minimum to stabilize the exponents
  double emin = kInf;
  for (Index i = 0; i < energies.size(); ++i)
    if (energies[i] < emin) emin = energies[i];
  if (!std::isfinite(emin)) emin = 0.0;
  auto ess_at = [&](double db) {
    ArrayXd lw = -db * n_data * (energies - emin);
    return ess(lw) / T;
  };
  const double full = 1.0 - beta_prev;
  if (ess_at(full) >= ess_target) return 1.0;
  double lo = 0.0, hi = full, mid = 0.5 * full;
  for (int it = 0; it < 60; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = ess_at(mid);
    if (std::abs(r - ess_target) <= 1e-6) break;
    if (r > ess_target)
      lo = mid;
    else
      hi = mid;
  }
  return beta_prev + mid;
}

std::vector<Index> systematic_resample(const ArrayXd& log_weights, Index S, Rng& rng) {
  const Index T = log_weights.size();
  const double lse = log_sum_exp(log_weights);
  if (lse == -kInf) throw std::runtime_error("systematic_resample: total weight is zero");
  const double u = rng.uniform01();
  std::vector<Index> out(static_cast<size_t>(S));
  Index i = 0;
  double c = std::exp(log_weights[0] - lse);
  for (Index j = 0; j < S; ++j) {
    const double target = (static_cast<double>(j) + u) / static_cast<double>(S);
    while (c < target && i < T - 1) {
      ++i;
      c += std::exp(log_weights[i] - lse);
    }
    out[static_cast<size_t>(j)] = i;
  }
  return out;
}

LevelDiag wastefree_level(const Problem& problem, ParticleEnsemble& ens, double beta_prev,
                          double beta_next, int level_index, const SmcConfig& cfg,
                          std::vector<StepHistoryEntry>& history, ThreadPool& pool) {
  const Index T = cfg.T;
  const Index S = T / cfg.n;
  const int n = cfg.n;
  const Index d = problem.dim();
  const double n_data = problem.n_data;
  const std::uint64_t lvl = static_cast<std::uint64_t>(level_index);
  const Rng base(ens.stream_key);

  LevelDiag diag;
  diag.beta = beta_next;

  ArrayXd logw = incremental_log_weights(ens, beta_next - beta_prev, n_data);
  diag.ess_ratio = ess(logw) / static_cast<double>(T);
  diag.log_mean_w = log_mean_exp(logw);

  Rng resample_rng = base.substream({kRoleResample, lvl});
  std::vector<Index> ancestors = systematic_resample(logw, S, resample_rng);

  const VectorXd step0 = predict_step_size(history, beta_next, problem.params);
  const long long adapt_sweeps = (n + 1) / 2;

  MatrixXd new_thetas(d, T);
  ArrayXd new_energies(T);
  std::vector<StepState> chain_steps(static_cast<size_t>(S), StepState(step0));

  pool.for_blocks(S, [&](std::int64_t lo, std::int64_t hi) {
    auto ev = problem.make_evaluator();
    for (std::int64_t c = lo; c < hi; ++c) {
      Rng rc = base.substream({kRoleChain, lvl, static_cast<std::uint64_t>(c)});
      VectorXd th = ens.thetas.col(ancestors[static_cast<size_t>(c)]);
      double e = ev->full(th);
      StepState& st = chain_steps[static_cast<size_t>(c)];
      for (int t = 1; t <= n; ++t) {
        cw_mh_sweep(problem, *ev, th, e, beta_next, st, rc, t <= adapt_sweeps, t);
        const Index slot = c * n + (t - 1);
        new_thetas.col(slot) = th;
        new_energies[slot] = e;
      }
    }
  });

  ens.thetas.swap(new_thetas);
  ens.energies.swap(new_energies);
  ens.log_weights.setZero();

  // pooled acceptance and geometric-mean step per component, in chain order
  StepHistoryEntry h;
  h.beta = beta_next;
  h.acc_rate.resize(d);
  h.step.resize(d);
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(d), prop = Eigen::ArrayXd::Zero(d),
                 logstep = Eigen::ArrayXd::Zero(d);
  for (Index c = 0; c < S; ++c) {
    const auto& st = chain_steps[static_cast<size_t>(c)];
    acc += st.accepts.cast<double>();
    prop += st.proposals.cast<double>();
    logstep += st.step.array().log();
  }
  for (Index i = 0; i < d; ++i) {
    h.acc_rate[i] = prop[i] > 0 ? acc[i] / prop[i] : 0.0;
    h.step[i] = std::exp(logstep[i] / static_cast<double>(S));
  }
  history.push_back(h);

  diag.acc_rate = prop.sum() > 0 ? acc.sum() / prop.sum() : 0.0;
  diag.sweeps = static_cast<std::int64_t>(S) * n;
  return diag;
}

SmcResult smc_run(const Problem& problem, const SmcConfig& cfg, ThreadPool& pool) {
  validate_smc_config(cfg);
  const double t0 = now_seconds();
  SmcResult res;
  ParticleEnsemble ens = init_ensemble(problem, cfg, pool);
  double beta = 0.0;
  double neg_log_z = 0.0;
  int level = 0;
  while (beta < 1.0) {
    if (level >= cfg.max_levels)
      throw std::runtime_error("smc: max_levels exceeded before reaching beta = 1");
    ++level;
    const double beta_next = next_beta(ens.energies, problem.n_data, beta, cfg.ess_target);
    LevelDiag diag =
        wastefree_level(problem, ens, beta, beta_next, level, cfg, res.step_history, pool);
    neg_log_z -= diag.log_mean_w;
    res.levels.push_back(diag);
    beta = beta_next;
  }
  res.F = neg_log_z;
  res.diverged = !std::isfinite(res.F);
  res.thetas = std::move(ens.thetas);
  res.energies = std::move(ens.energies);
  res.wall_seconds = now_seconds() - t0;
  return res;
}

SmcResult smc_run(const Problem& problem, const SmcConfig& cfg) {
  ThreadPool pool(cfg.workers == 0 ? ThreadPool::hardware_workers() : cfg.workers);
  return smc_run(problem, cfg, pool);
}

RunReport smc_run(const ModelSpec& spec, const Spectrum& data, const SmcConfig& cfg) {
  Problem problem = make_problem(spec, data);
  SmcResult res = smc_run(problem, cfg);
  RunReport r;
  r.sampler = "smc";
  r.F = res.F;
  r.diverged = res.diverged;
  r.wall_seconds = res.wall_seconds;
  for (auto& p : spec.layout) r.param_names.push_back(p.name);
  r.scalars["T"] = static_cast<double>(cfg.T);
  r.scalars["n"] = cfg.n;
  r.scalars["ess_target"] = cfg.ess_target;
  r.scalars["seed"] = static_cast<double>(cfg.seed);
  r.scalars["workers"] = cfg.workers;
  r.scalars["n_data"] = problem.n_data;
  r.scalars["levels"] = static_cast<double>(res.levels.size());
  const Index L = static_cast<Index>(res.levels.size());
  VectorXd ladder(L + 1), less(L), lw(L), lacc(L);
  ladder[0] = 0.0;
  for (Index i = 0; i < L; ++i) {
    ladder[i + 1] = res.levels[static_cast<size_t>(i)].beta;
    less[i] = res.levels[static_cast<size_t>(i)].ess_ratio;
    lw[i] = res.levels[static_cast<size_t>(i)].log_mean_w;
    lacc[i] = res.levels[static_cast<size_t>(i)].acc_rate;
  }
  r.arrays["ladder"] = ladder;
  r.arrays["level_ess_ratio"] = less;
  r.arrays["level_log_mean_w"] = lw;
  r.arrays["level_acc_rate"] = lacc;
  r.posterior = std::move(res.thetas);
  return r;
}

}  // namespace specmc

#include "specmc/remc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace specmc {

namespace {

constexpr std::uint64_t kRoleReplica = 11;
constexpr std::uint64_t kRoleSwap = 12;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

VectorXd geometric_ladder(int L) {
  if (L < 1) throw std::invalid_argument("remc: L must be >= 1");
  VectorXd b(L + 1);
  b[0] = 0.0;
  for (int j = 1; j <= L; ++j)
    b[j] = L == 1 ? 1.0 : std::pow(10.0, -5.0 * static_cast<double>(L - j) / (L - 1));
  b[L] = 1.0;
  return b;
}

VectorXd remc_ladder(const RemcConfig& cfg) {
  if (cfg.ladder.size() == 0) return geometric_ladder(cfg.L);
  const VectorXd& b = cfg.ladder;
  if (b.size() < 2) throw std::invalid_argument("remc: explicit ladder needs >= 2 entries");
  if (b[0] != 0.0) throw std::invalid_argument("remc: ladder must start at beta = 0");
  if (b[b.size() - 1] != 1.0) throw std::invalid_argument("remc: ladder must end at beta = 1");
  for (Index i = 1; i < b.size(); ++i)
    if (!(b[i] > b[i - 1])) throw std::invalid_argument("remc: ladder must be strictly increasing");
  return b;
}

void validate_remc_config(const RemcConfig& cfg) {
  remc_ladder(cfg);
  if (cfg.total_sweeps < 1) throw std::invalid_argument("remc: total_sweeps must be >= 1");
  if (!(cfg.burn_in_fraction > 0.0 && cfg.burn_in_fraction < 1.0))
    throw std::invalid_argument("remc: burn_in_fraction must lie in (0, 1)");
  if (cfg.swap_period < 1) throw std::invalid_argument("remc: swap_period must be >= 1");
  if (cfg.workers < 0) throw std::invalid_argument("remc: workers must be >= 0");
}

void swap_step(RemcState& st, int parity, Rng& rng) {
  const Index R = st.ladder.size();  // replicas including beta = 0
  for (Index l = (parity % 2 == 0) ? 0 : 1; l + 1 < R; l += 2) {
    st.swap_attempts[l] += 1;
    const double dbeta = st.ladder[l + 1] - st.ladder[l];
    const double log_alpha = dbeta * st.n_data * (st.energies[l + 1] - st.energies[l]);
    bool accept;
    if (log_alpha >= 0.0) {
      accept = true;
    } else {
      accept = std::log(rng.uniform01()) < log_alpha;  // NaN compares false
    }
    if (accept) {
      st.swap_accepts[l] += 1;
      st.thetas[static_cast<size_t>(l)].swap(st.thetas[static_cast<size_t>(l + 1)]);
      std::swap(st.energies[l], st.energies[l + 1]);
      std::swap(st.evals[static_cast<size_t>(l)], st.evals[static_cast<size_t>(l + 1)]);
    }
  }
}

double free_energy_remc(const std::vector<LogMeanAcc>& accumulators) {
  double f = 0.0;
  for (const auto& acc : accumulators) f -= acc.log_mean();
  return f;
}

RemcResult remc_run(const Problem& problem, const RemcConfig& cfg, ThreadPool& pool) {
  validate_remc_config(cfg);
  const double t0 = now_seconds();
  const VectorXd ladder = remc_ladder(cfg);
  const Index R = ladder.size();
  const int d = problem.dim();

  std::int64_t n_burn = static_cast<std::int64_t>(
      std::llround(cfg.burn_in_fraction * static_cast<double>(cfg.total_sweeps)));
  if (n_burn < 0) n_burn = 0;
  if (n_burn > cfg.total_sweeps - 1) n_burn = cfg.total_sweeps - 1;
  const std::int64_t retained = cfg.total_sweeps - n_burn;

  RemcState st;
  st.ladder = ladder;
  st.n_data = problem.n_data;
  st.energies.resize(R);
  st.swap_accepts = Eigen::ArrayXi::Zero(R - 1);
  st.swap_attempts = Eigen::ArrayXi::Zero(R - 1);
  st.pair_acc.resize(static_cast<size_t>(R - 1));
  st.thetas.resize(static_cast<size_t>(R));
  st.evals.resize(static_cast<size_t>(R));
  st.steps.reserve(static_cast<size_t>(R));
  st.rngs.reserve(static_cast<size_t>(R));

  const VectorXd step0 = initial_step_sizes(problem.params);
  const Rng base(cfg.seed);
  for (Index l = 0; l < R; ++l) {
    st.steps.emplace_back(step0);
    st.rngs.push_back(base.substream({kRoleReplica, static_cast<std::uint64_t>(l)}));
  }
  pool.for_blocks(R, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t l = lo; l < hi; ++l) {
      st.thetas[static_cast<size_t>(l)] = prior_sample(problem.params, st.rngs[static_cast<size_t>(l)]);
      st.evals[static_cast<size_t>(l)] = problem.make_evaluator();
      st.energies[l] = st.evals[static_cast<size_t>(l)]->full(st.thetas[static_cast<size_t>(l)]);
    }
  });

  Rng swap_rng = base.substream({kRoleSwap});
  MatrixXd posterior(d, retained);
  Index kept = 0;

  for (std::int64_t t = 1; t <= cfg.total_sweeps; ++t) {
    const bool adapt = t <= n_burn;
    pool.for_blocks(R, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t l = lo; l < hi; ++l) {
        const size_t ul = static_cast<size_t>(l);
        cw_mh_sweep(problem, *st.evals[ul], st.thetas[ul], st.energies[l], ladder[l], st.steps[ul],
                    st.rngs[ul], adapt, t);
      }
    });
    if (t % cfg.swap_period == 0)
      swap_step(st, static_cast<int>((t / cfg.swap_period) % 2), swap_rng);
    if (t == n_burn)
      for (auto& s : st.steps) s.reset_tallies();
    if (t > n_burn) {
      for (Index l = 0; l + 1 < R; ++l)
        st.pair_acc[static_cast<size_t>(l)].add(
            tempered_term(ladder[l + 1] - ladder[l], problem.n_data, st.energies[l]));
      posterior.col(kept++) = st.thetas[static_cast<size_t>(R - 1)];
    }
  }

  RemcResult res;
  res.F = free_energy_remc(st.pair_acc);
  if (!std::isfinite(res.F)) {
    res.F = kNaN;
    res.diverged = true;
  }
  res.posterior = std::move(posterior);
  res.ladder = ladder;
  res.swap_rate.resize(R - 1);
  for (Index l = 0; l + 1 < R; ++l)
    res.swap_rate[l] = st.swap_attempts[l] > 0
                           ? static_cast<double>(st.swap_accepts[l]) / st.swap_attempts[l]
                           : 0.0;
  res.replica_acc.resize(R);
  for (Index l = 0; l < R; ++l) {
    const auto& s = st.steps[static_cast<size_t>(l)];
    const double prop = s.proposals.cast<double>().sum();
    res.replica_acc[l] = prop > 0 ? s.accepts.cast<double>().sum() / prop : 0.0;
  }
  res.wall_seconds = now_seconds() - t0;
  return res;
}

RemcResult remc_run(const Problem& problem, const RemcConfig& cfg) {
  ThreadPool pool(cfg.workers == 0 ? ThreadPool::hardware_workers() : cfg.workers);
  return remc_run(problem, cfg, pool);
}

RunReport remc_run(const ModelSpec& spec, const Spectrum& data, const RemcConfig& cfg) {
  Problem problem = make_problem(spec, data);
  RemcResult res = remc_run(problem, cfg);
  RunReport r;
  r.sampler = "remc";
  r.F = res.F;
  r.diverged = res.diverged;
  r.wall_seconds = res.wall_seconds;
  for (auto& p : spec.layout) r.param_names.push_back(p.name);
  r.scalars["L"] = static_cast<double>(res.ladder.size() - 1);
  r.scalars["total_sweeps"] = static_cast<double>(cfg.total_sweeps);
  r.scalars["burn_in_fraction"] = cfg.burn_in_fraction;
  r.scalars["swap_period"] = static_cast<double>(cfg.swap_period);
  r.scalars["seed"] = static_cast<double>(cfg.seed);
  r.scalars["workers"] = cfg.workers;
  r.scalars["n_data"] = problem.n_data;
  r.arrays["ladder"] = res.ladder;
  r.arrays["swap_rate"] = res.swap_rate;
  r.arrays["replica_acc_rate"] = res.replica_acc;
  r.posterior = std::move(res.posterior);
  return r;
}

}  // namespace specmc

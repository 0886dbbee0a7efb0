#ifndef SPECMC_REMC_HPP
#define SPECMC_REMC_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "specmc/mcmc.hpp"
#include "specmc/parallel.hpp"
#include "specmc/report.hpp"

namespace specmc {

struct RemcConfig {
  int L = 44;      // replicas above beta = 0; ladder has L + 1 entries
  VectorXd ladder; // explicit beta_0 .. beta_L; empty = geometric default
  std::int64_t total_sweeps = 10000;
  double burn_in_fraction = 0.5;    // in (0, 1)
  std::int64_t swap_period = 1;     // > total_sweeps disables swaps
  std::uint64_t seed = 0;
  int workers = 1;  // 0 = hardware concurrency
};

// beta_0 = 0, then geometric from 1e-5 to 1 over L points.
VectorXd geometric_ladder(int L);

// The ladder the run will use; validates monotonicity and the 0/1 endpoints.
VectorXd remc_ladder(const RemcConfig& cfg);

void validate_remc_config(const RemcConfig& cfg);  // throws std::invalid_argument

// One chain per ladder point. Swaps exchange theta, the cached energy, and
// the evaluator; the step state and the RNG stream stay with the level.
struct RemcState {
  VectorXd ladder;
  double n_data = 0;
  std::vector<VectorXd> thetas;   // per replica
  ArrayXd energies;               // per-point E, +inf allowed
  std::vector<StepState> steps;
  std::vector<std::unique_ptr<Evaluator>> evals;
  std::vector<Rng> rngs;
  Eigen::ArrayXi swap_accepts;    // per adjacent pair (l, l+1)
  Eigen::ArrayXi swap_attempts;
  std::vector<LogMeanAcc> pair_acc;  // post-burn-in means of exp(-dbeta N E_l)
};

// Attempts every adjacent pair (l, l+1) with l of the given parity, in
// increasing l; accept probability min{1, exp[(b_{l+1}-b_l) N (E_{l+1}-E_l)]}.
void swap_step(RemcState& st, int parity, Rng& rng);

// F = -sum_l log(mean_l), each mean in log-sum-exp form.
double free_energy_remc(const std::vector<LogMeanAcc>& accumulators);

struct RemcResult {
  double F = kNaN;
  bool diverged = false;
  MatrixXd posterior;      // beta = 1 draws, one column per retained sweep
  VectorXd ladder;
  VectorXd swap_rate;      // per pair; 0 when never attempted
  VectorXd replica_acc;    // post-burn-in acceptance per replica
  double wall_seconds = 0.0;
};

RemcResult remc_run(const Problem& problem, const RemcConfig& cfg, ThreadPool& pool);
RemcResult remc_run(const Problem& problem, const RemcConfig& cfg);

// Contract wrapper: builds the problem, runs, assembles the report document.
RunReport remc_run(const ModelSpec& spec, const Spectrum& data, const RemcConfig& cfg);

}  // namespace specmc

#endif

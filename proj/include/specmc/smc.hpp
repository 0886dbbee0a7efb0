#ifndef SPECMC_SMC_HPP
#define SPECMC_SMC_HPP

#include <cstdint>

#include "specmc/mcmc.hpp"
#include "specmc/parallel.hpp"
#include "specmc/report.hpp"

namespace specmc {

struct SmcConfig {
  std::int64_t T = 10000;   // particle count; must be divisible by n, T/n >= 2
  int n = 10;               // sweeps per chain and level
  double ess_target = 0.5;  // in (0, 1)
  int max_levels = 2000;
  std::uint64_t seed = 0;
  int workers = 1;  // 0 = hardware concurrency
};

void validate_smc_config(const SmcConfig& cfg);  // throws std::invalid_argument

// Weighted ensemble between levels. Slot streams are derived on demand from
// stream_key, so the stored state stays trivially copyable.
struct ParticleEnsemble {
  MatrixXd thetas;    // d x T
  ArrayXd energies;   // per-point E, +inf allowed
  ArrayXd log_weights;
  std::uint64_t stream_key = 0;
};

struct LevelDiag {
  double beta;
  double ess_ratio;    // ESS/T of the incremental weights into this level
  double log_mean_w;   // evidence increment
  double acc_rate;     // pooled over chains and components
  std::int64_t sweeps; // component sweeps executed (== T by construction)
};

struct SmcResult {
  double F = kNaN;
  bool diverged = false;
  MatrixXd thetas;    // final beta = 1 ensemble (uniform weights)
  ArrayXd energies;
  std::vector<LevelDiag> levels;
  std::vector<StepHistoryEntry> step_history;
  double wall_seconds = 0.0;
};

// T independent prior draws at beta = 0, energies evaluated.
ParticleEnsemble init_ensemble(const Problem& problem, const SmcConfig& cfg, ThreadPool& pool);

// log w_i = -delta_beta * N * E_i; delta_beta = 0 gives exact zeros.
ArrayXd incremental_log_weights(const ParticleEnsemble& ens, double delta_beta, double n_data);

// (sum w)^2 / sum w^2 on normalized weights; throws if all weights vanish.
double ess(const ArrayXd& log_weights);

// Bisection on delta beta so that ESS/T hits ess_target (tolerance 1e-6,
// <= 60 iterations); jumps to 1 when the full remaining step keeps ESS at or
// above target.
double next_beta(const ArrayXd& energies, double n_data, double beta_prev, double ess_target);

// Single uniform offset, stride 1/S over the normalized CDF; sorted output.
std::vector<Index> systematic_resample(const ArrayXd& log_weights, Index S, Rng& rng);

// One waste-free level: weight at beta_next, record the evidence increment,
// resample S = T/n ancestors, run n-sweep chains, keep every post-sweep state
// (exactly T sweeps, ensemble size stays T), uniform output weights.
LevelDiag wastefree_level(const Problem& problem, ParticleEnsemble& ens, double beta_prev,
                          double beta_next, int level_index, const SmcConfig& cfg,
                          std::vector<StepHistoryEntry>& history, ThreadPool& pool);

SmcResult smc_run(const Problem& problem, const SmcConfig& cfg, ThreadPool& pool);
SmcResult smc_run(const Problem& problem, const SmcConfig& cfg);

// Contract wrapper: builds the problem, runs, assembles the report document.
RunReport smc_run(const ModelSpec& spec, const Spectrum& data, const SmcConfig& cfg);

}  // namespace specmc

#endif

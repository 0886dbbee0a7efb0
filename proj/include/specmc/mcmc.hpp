#ifndef SPECMC_MCMC_HPP
#define SPECMC_MCMC_HPP

#include "specmc/energy.hpp"

namespace specmc {

inline constexpr double kStepMin = 1e-12;
inline constexpr double kStepMax = 1e12;

struct StepHistoryEntry {
  double beta;
  VectorXd acc_rate;  // per component
  VectorXd step;      // per component
};

// Per-chain (or per-replica) adaptive state; never shared across workers.
struct StepState {
  VectorXd step;             // current sizes, always in [kStepMin, kStepMax]
  Eigen::ArrayXi accepts;    // tallies since the last reset
  Eigen::ArrayXi proposals;
  std::vector<StepHistoryEntry> history;

  explicit StepState(const VectorXd& step0)
      : step(step0),
        accepts(Eigen::ArrayXi::Zero(step0.size())),
        proposals(Eigen::ArrayXi::Zero(step0.size())) {}
  void reset_tallies() {
    accepts.setZero();
    proposals.setZero();
  }
};

// Prior scales: the empty-history step-size default.
VectorXd initial_step_sizes(const std::vector<ScalarParam>& params);

// log s += (1/t^0.6) (1{accepted} - 1/2), clamped. t >= 1 is the sweep index
// within the current adaptation phase.
void robbins_monro_update(StepState& st, int comp, bool accepted, long long t);

// Least-squares line through (log beta, log s_adj) over the most recent
// window (5 entries), s_adj = s exp(2 (acc - 1/2)); evaluated at beta_next.
// Empty history falls back to prior scales, a single entry to its s_adj.
VectorXd predict_step_size(const std::vector<StepHistoryEntry>& history, double beta_next,
                           const std::vector<ScalarParam>& params);

// One component-wise random-walk Metropolis sweep at inverse temperature
// beta: every component proposed once, in layout order, Gaussian increments.
// e_cache must equal the evaluator's committed energy of theta (or +inf) and
// is updated to match the returned theta. Returns the number of accepts.
// When adapt is set, each proposal triggers a Robbins-Monro update with
// index t_adapt.
int cw_mh_sweep(const Problem& problem, Evaluator& ev, VectorXd& theta, double& e_cache,
                double beta, StepState& st, Rng& rng, bool adapt = false, long long t_adapt = 1);

// Contract-shaped convenience wrapper (fresh evaluator per call).
int cw_mh_sweep(const ModelSpec& spec, const Spectrum& data, VectorXd& theta, double& e_cache,
                double beta, StepState& st, Rng& rng);

}  // namespace specmc

#endif

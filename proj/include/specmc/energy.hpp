#ifndef SPECMC_ENERGY_HPP
#define SPECMC_ENERGY_HPP

#include <functional>
#include <memory>

#include "specmc/model.hpp"

namespace specmc {

// Per-point mean negative log-likelihood; +inf is the rejection sentinel
// (forward fault, f <= 0 under Poisson, zero variance).
double data_energy(const NoiseSpec& noise, const ArrayXd& ys, const ArrayXd& f);

// Contract-shaped wrappers over (spec, data).
double energy(const ModelSpec& spec, const VectorXd& theta, const Spectrum& data);
double log_target(const ModelSpec& spec, const VectorXd& theta, const Spectrum& data, double beta);

// Tempered log-target piece: -beta * N * E, with beta = 0 meaning "prior
// only" even when E is infinite (0 * inf would otherwise poison it).
inline double tempered_term(double beta, double n_data, double e) {
  if (beta == 0.0) return 0.0;
  return -beta * n_data * e;
}

// Stateful per-chain energy evaluator. trial() evaluates a candidate that
// differs from the committed state in one component; commit() adopts it.
// Every path must return exactly what a fresh full() of the same theta
// returns, bit for bit.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double full(const VectorXd& theta) = 0;                // evaluates and commits
  virtual double trial(const VectorXd& theta, int changed) = 0;  // does not commit
  virtual void commit() = 0;                                     // adopt the last trial
};

// Sampling problem: parameter layout plus an energy oracle. Samplers depend
// only on this, so test targets (conjugate oracles, counting probes) run
// through the same code paths as the spectral models.
struct Problem {
  std::vector<ScalarParam> params;
  double n_data = 0;
  std::function<std::unique_ptr<Evaluator>()> make_evaluator;

  int dim() const { return static_cast<int>(params.size()); }
  double energy(const VectorXd& theta) const { return make_evaluator()->full(theta); }
};

Problem make_problem(const ModelSpec& spec, const Spectrum& data);
Problem make_custom_problem(std::vector<ScalarParam> params, double n_data,
                            std::function<double(const VectorXd&)> energy_fn);

}  // namespace specmc

#endif

#include "specmc/mcmc.hpp"

#include <cmath>

namespace specmc {

VectorXd initial_step_sizes(const std::vector<ScalarParam>& params) {
  VectorXd s(static_cast<Index>(params.size()));
  for (size_t i = 0; i < params.size(); ++i)
    s[static_cast<Index>(i)] = std::clamp(prior_scale(params[i].prior), kStepMin, kStepMax);
  return s;
}

void robbins_monro_update(StepState& st, int comp, bool accepted, long long t) {
  const double gamma = 1.0 / std::pow(static_cast<double>(t), 0.6);
  double ls = std::log(st.step[comp]) + gamma * ((accepted ? 1.0 : 0.0) - 0.5);
  st.step[comp] = std::clamp(std::exp(ls), kStepMin, kStepMax);
}

VectorXd predict_step_size(const std::vector<StepHistoryEntry>& history, double beta_next,
                           const std::vector<ScalarParam>& params) {
  const Index d = static_cast<Index>(params.size());
  if (history.empty()) return initial_step_sizes(params);
  constexpr size_t kWindow = 5;
  constexpr double kKappa = 2.0;
  const size_t first = history.size() > kWindow ? history.size() - kWindow : 0;
  const size_t m = history.size() - first;
  VectorXd out(d);
  const double lx = std::log(beta_next);
  for (Index c = 0; c < d; ++c) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t j = first; j < history.size(); ++j) {
      const auto& h = history[j];
      double x = std::log(h.beta);
      double y = std::log(h.step[c]) + kKappa * (h.acc_rate[c] - 0.5);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double pred;
    const double denom = m * sxx - sx * sx;
    if (m < 2 || std::abs(denom) < 1e-12 * (m * sxx + sx * sx + 1e-300)) {
      pred = sy / m;  // flat fit: single point or identical betas
    } else {
      const double slope = (m * sxy - sx * sy) / denom;
      const double icept = (sy - slope * sx) / m;
      pred = icept + slope * lx;
    }
    out[c] = std::clamp(std::exp(pred), kStepMin, kStepMax);
  }
  return out;
}

int cw_mh_sweep(const Problem& problem, Evaluator& ev, VectorXd& theta, double& e_cache,
                double beta, StepState& st, Rng& rng, bool adapt, long long t_adapt) {
  const int d = problem.dim();
  const double n = problem.n_data;
  int accepted_count = 0;
  for (int i = 0; i < d; ++i) {
    const double z = rng.normal();
    const double old_i = theta[i];
    const double new_i = old_i + st.step[i] * z;
    const double lp_old = prior_logpdf1(problem.params[i].prior, old_i);
    const double lp_new = prior_logpdf1(problem.params[i].prior, new_i);
    ++st.proposals[i];
    bool accept = false;
    if (lp_new != -kInf) {
      theta[i] = new_i;
      const double e_new = ev.trial(theta, i);
      double log_ratio;
      if (beta == 0.0 || (e_new == kInf && e_cache == kInf)) {
        log_ratio = lp_new - lp_old;  // energies cancel or are tempered away
      } else if (e_new == kInf) {
        log_ratio = -kInf;
      } else if (e_cache == kInf) {
        log_ratio = kInf;
      } else {
        log_ratio = -beta * n * (e_new - e_cache) + (lp_new - lp_old);
      }
      if (log_ratio >= 0.0 || std::log(rng.uniform01()) < log_ratio) {
        accept = true;
        ev.commit();
        e_cache = e_new;
      } else {
        theta[i] = old_i;
      }
    }
    if (accept) {
      ++st.accepts[i];
      ++accepted_count;
    }
    if (adapt) robbins_monro_update(st, i, accept, t_adapt);
  }
  return accepted_count;
}

int cw_mh_sweep(const ModelSpec& spec, const Spectrum& data, VectorXd& theta, double& e_cache,
                double beta, StepState& st, Rng& rng) {
  Problem p = make_problem(spec, data);
  auto ev = p.make_evaluator();
  e_cache = ev->full(theta);
  return cw_mh_sweep(p, *ev, theta, e_cache, beta, st, rng);
}

}  // namespace specmc

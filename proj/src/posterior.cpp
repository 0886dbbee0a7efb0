#include "specmc/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace specmc {

double weighted_quantile(const ArrayXd& samples, const ArrayXd& weights, double q) {
  const Index n = samples.size();
  if (n == 0) throw std::invalid_argument("weighted_quantile: empty input");
  if (weights.size() != n) throw std::invalid_argument("weighted_quantile: size mismatch");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("weighted_quantile: q outside [0, 1]");
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(samples[i]))
      throw std::invalid_argument("weighted_quantile: non-finite sample");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("weighted_quantile: bad weight");
    total += weights[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("weighted_quantile: zero total weight");

  // zero-mass atoms are invisible to the weighted empirical distribution
  std::vector<Index> idx;
  idx.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    if (weights[i] > 0.0) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return samples[a] < samples[b]; });
  const Index m = static_cast<Index>(idx.size());

  const auto value = [&](Index i) { return samples[idx[static_cast<size_t>(i)]]; };
  // the last plotting position is 1 by construction; don't let the running
  // sum's rounding push it past and drag q = 1 into the interpolation branch
  if (q >= 1.0) return value(m - 1);

  ArrayXd p(m);
  const double w_last = weights[idx.back()] / total;
  const double denom = 1.0 - w_last;
  double c = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double w = weights[idx[static_cast<size_t>(i)]] / total;
    p[i] = denom > 0.0 ? c / denom : 0.0;  // denom = 0 only when one atom carries all mass
    c += w;
  }

  if (q <= p[0]) return value(0);
  if (q >= p[m - 1]) return value(m - 1);
  // first position strictly above q; its left neighbor is <= q
  const Index hi = std::upper_bound(p.data(), p.data() + m, q) - p.data();
  const Index lo = hi - 1;
  const double t = (q - p[lo]) / (p[hi] - p[lo]);
  return value(lo) + t * (value(hi) - value(lo));
}

std::pair<double, double> credible_interval(const ArrayXd& samples, const ArrayXd& weights,
                                            double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("credible_interval: level outside (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  return {weighted_quantile(samples, weights, tail),
          weighted_quantile(samples, weights, 1.0 - tail)};
}

ModelChoice model_select(const std::vector<std::pair<int, RunReport>>& reports) {
  if (reports.empty()) throw std::invalid_argument("model_select: no reports");
  std::map<int, std::vector<double>> by_k;
  std::map<int, bool> bad;
  for (const auto& [k, rep] : reports) {
    by_k[k].push_back(rep.F);
    if (!std::isfinite(rep.F) || rep.diverged) bad[k] = true;
  }
  ModelChoice out;
  bool have_best = false;
  double best_f = kInf;
  for (const auto& [k, fs] : by_k) {
    ModelChoiceRow row;
    row.K = k;
    row.trials = static_cast<int>(fs.size());
    row.excluded = bad.count(k) > 0;
    if (!row.excluded) {
      double mean = 0.0;
      for (double f : fs) mean += f;
      mean /= static_cast<double>(fs.size());
      row.F = mean;
      if (fs.size() > 1) {
        double ss = 0.0;
        for (double f : fs) ss += (f - mean) * (f - mean);
        row.trial_std = std::sqrt(ss / static_cast<double>(fs.size() - 1));
      }
      if (!have_best || mean < best_f) {  // map order: ties keep the smaller K
        have_best = true;
        best_f = mean;
        out.K_best = k;
      }
    }
    out.table.push_back(row);
  }
  if (!have_best) throw std::runtime_error("model_select: every candidate diverged");
  return out;
}

MatrixXd sort_peak_blocks(const MatrixXd& posterior, int block, int center_off, int n_blocks) {
  if (block < 1 || center_off < 0 || center_off >= block || n_blocks < 0)
    throw std::invalid_argument("sort_peak_blocks: bad block geometry");
  if (static_cast<Index>(block) * n_blocks > posterior.rows())
    throw std::invalid_argument("sort_peak_blocks: blocks exceed the layout");
  if (posterior.cols() == 0 || n_blocks < 2) return posterior;

  std::vector<std::pair<double, int>> keyed(static_cast<size_t>(n_blocks));
  for (int b = 0; b < n_blocks; ++b)
    keyed[static_cast<size_t>(b)] = {posterior.row(b * block + center_off).mean(), b};
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  MatrixXd out = posterior;
  for (int b = 0; b < n_blocks; ++b) {
    const int src = keyed[static_cast<size_t>(b)].second;
    out.middleRows(b * block, block) = posterior.middleRows(src * block, block);
  }
  return out;
}

}  // namespace specmc

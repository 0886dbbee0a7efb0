#ifndef SPECMC_POSTERIOR_HPP
#define SPECMC_POSTERIOR_HPP

#include <utility>
#include <vector>

#include "specmc/report.hpp"

namespace specmc {

// Linear-interpolation quantile of the weighted empirical CDF. Plotting
// positions p_i = (c_i - w_i) / (1 - w_last) over value-sorted samples, so
// uniform weights reduce to the classic (i-1)/(n-1) interpolated quantile
// and q = 0 / q = 1 give the extremes.
double weighted_quantile(const ArrayXd& samples, const ArrayXd& weights, double q);

// Equal-tailed: quantiles at (1 - level)/2 and 1 - (1 - level)/2.
std::pair<double, double> credible_interval(const ArrayXd& samples, const ArrayXd& weights,
                                            double level);

struct ModelChoiceRow {
  int K = 0;
  double F = kNaN;      // mean over that candidate's reports
  double trial_std = 0; // 0 when a single report
  int trials = 0;
  bool excluded = false;  // a non-finite F appeared; dropped from the argmin
};

struct ModelChoice {
  int K_best = 0;
  std::vector<ModelChoiceRow> table;  // sorted by K
};

// argmin mean F over candidates; ties toward smaller K; throws when every
// candidate is excluded.
ModelChoice model_select(const std::vector<std::pair<int, RunReport>>& reports);

// Reorders exchangeable peak blocks (rows [b*block, (b+1)*block), center
// component at +center_off) by posterior-mean center; rows past
// n_blocks*block stay in place. Stabilizes per-peak summaries when labels
// carry no meaning.
MatrixXd sort_peak_blocks(const MatrixXd& posterior, int block, int center_off, int n_blocks);

}  // namespace specmc

#endif

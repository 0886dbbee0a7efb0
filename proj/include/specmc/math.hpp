#ifndef SPECMC_MATH_HPP
#define SPECMC_MATH_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specmc {

using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log(sum_i exp(v_i)). -inf entries carry zero mass; an empty array is -inf.
inline double log_sum_exp(const ArrayXd& v) {
  if (v.size() == 0) return -kInf;
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a +inf/NaN entry dominates
  double s = (v - m).exp().sum();
  return m + std::log(s);
}

inline double log_mean_exp(const ArrayXd& v) {
  return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

// Online log(mean(exp(.))) accumulator. Terms are folded in call order with a
// running-max rescale, so the result is deterministic for a fixed feed order.
class LogMeanAcc {
 public:
  void add(double log_term) {
    ++n_;
    if (std::isnan(log_term)) { max_ = kNaN; return; }
    if (log_term == -kInf) return;
    if (max_ == -kInf || log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  long long count() const { return n_; }
  // log of the running mean; requires at least one term.
  double log_mean() const {
    if (n_ == 0) throw std::runtime_error("LogMeanAcc: empty accumulator");
    if (std::isnan(max_)) return kNaN;
    if (max_ == -kInf) return -kInf;
    return max_ + std::log(sum_) - std::log(static_cast<double>(n_));
  }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
  long long n_ = 0;
};

// Cumulative trapezoidal integral along xs; out[0] = 0.
inline ArrayXd cumtrapz(const ArrayXd& xs, const ArrayXd& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("cumtrapz: size mismatch");
  ArrayXd out(xs.size());
  if (xs.size() == 0) return out;
  out[0] = 0.0;
  for (Index i = 1; i < xs.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
  return out;
}

}  // namespace specmc

#endif

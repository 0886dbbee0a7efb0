#ifndef SPECMC_PRIORS_HPP
#define SPECMC_PRIORS_HPP

#include <string>
#include <variant>
#include <vector>

#include "specmc/math.hpp"
#include "specmc/rng.hpp"

namespace specmc {

struct NormalPrior {
  double mean;
  double var;  // > 0
};
struct GammaPrior {
  double shape;  // > 0
  double rate;   // > 0
};
struct UniformPrior {
  double lo;
  double hi;  // lo < hi
};

using PriorSpec = std::variant<NormalPrior, GammaPrior, UniformPrior>;

// Throws std::invalid_argument on parameter-range violations.
void validate_prior(const PriorSpec& p);

double prior_logpdf1(const PriorSpec& p, double x);  // -inf outside support
double prior_sample1(const PriorSpec& p, Rng& rng);
double prior_scale(const PriorSpec& p);  // std; uniform gives range/sqrt(12)

// "normal(mean,var)" | "gamma(shape,rate)" | "uniform(lo,hi)"
PriorSpec parse_prior(const std::string& text);
std::string prior_to_string(const PriorSpec& p);

struct ScalarParam {
  std::string name;
  PriorSpec prior;
};

double prior_logpdf(const std::vector<ScalarParam>& params, const VectorXd& theta);
VectorXd prior_sample(const std::vector<ScalarParam>& params, Rng& rng);

}  // namespace specmc

#endif

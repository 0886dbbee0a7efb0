#include "specmc/priors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace specmc {

void validate_prior(const PriorSpec& p) {
  if (auto* n = std::get_if<NormalPrior>(&p)) {
    if (!(n->var > 0.0) || !std::isfinite(n->var) || !std::isfinite(n->mean))
      throw std::invalid_argument("normal prior needs finite mean and var > 0");
  } else if (auto* g = std::get_if<GammaPrior>(&p)) {
    if (!(g->shape > 0.0) || !(g->rate > 0.0))
      throw std::invalid_argument("gamma prior needs shape > 0 and rate > 0");
  } else {
    auto& u = std::get<UniformPrior>(p);
    if (!(u.lo < u.hi)) throw std::invalid_argument("uniform prior needs lo < hi");
  }
}

double prior_logpdf1(const PriorSpec& p, double x) {
  if (auto* n = std::get_if<NormalPrior>(&p)) {
    double d = x - n->mean;
    return -0.5 * std::log(2.0 * M_PI * n->var) - d * d / (2.0 * n->var);
  }
  if (auto* g = std::get_if<GammaPrior>(&p)) {
    if (!(x > 0.0)) return -kInf;
    return g->shape * std::log(g->rate) - std::lgamma(g->shape) +
           (g->shape - 1.0) * std::log(x) - g->rate * x;
  }
  auto& u = std::get<UniformPrior>(p);
  if (x < u.lo || x > u.hi) return -kInf;
  return -std::log(u.hi - u.lo);
}

double prior_sample1(const PriorSpec& p, Rng& rng) {
  if (auto* n = std::get_if<NormalPrior>(&p)) return n->mean + std::sqrt(n->var) * rng.normal();
  if (auto* g = std::get_if<GammaPrior>(&p)) return rng.gamma(g->shape, g->rate);
  auto& u = std::get<UniformPrior>(p);
  return rng.uniform(u.lo, u.hi);
}

double prior_scale(const PriorSpec& p) {
  if (auto* n = std::get_if<NormalPrior>(&p)) return std::sqrt(n->var);
  if (auto* g = std::get_if<GammaPrior>(&p)) return std::sqrt(g->shape) / g->rate;
  auto& u = std::get<UniformPrior>(p);
  return (u.hi - u.lo) / std::sqrt(12.0);
}

PriorSpec parse_prior(const std::string& text) {
  auto lp = text.find('(');
  auto rp = text.rfind(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp)
    throw std::invalid_argument("bad prior syntax: " + text);
  std::string kind = text.substr(0, lp);
  const auto k0 = kind.find_first_not_of(" \t");
  const auto k1 = kind.find_last_not_of(" \t");
  kind = k0 == std::string::npos ? std::string() : kind.substr(k0, k1 - k0 + 1);
  std::string args = text.substr(lp + 1, rp - lp - 1);
  for (auto& c : args)
    if (c == ',') c = ' ';
  std::istringstream ss(args);
  double a, b;
  if (!(ss >> a >> b)) throw std::invalid_argument("bad prior arguments: " + text);
  std::string rest;
  if (ss >> rest) throw std::invalid_argument("too many prior arguments: " + text);
  PriorSpec p;
  if (kind == "normal")
    p = NormalPrior{a, b};
  else if (kind == "gamma")
    p = GammaPrior{a, b};
  else if (kind == "uniform")
    p = UniformPrior{a, b};
  else
    throw std::invalid_argument("unknown prior family: " + kind);
  validate_prior(p);
  return p;
}

std::string prior_to_string(const PriorSpec& p) {
  std::ostringstream ss;
  ss.precision(17);
  if (auto* n = std::get_if<NormalPrior>(&p))
    ss << "normal(" << n->mean << "," << n->var << ")";
  else if (auto* g = std::get_if<GammaPrior>(&p))
    ss << "gamma(" << g->shape << "," << g->rate << ")";
  else {
    auto& u = std::get<UniformPrior>(p);
    ss << "uniform(" << u.lo << "," << u.hi << ")";
  }
  return ss.str();
}

double prior_logpdf(const std::vector<ScalarParam>& params, const VectorXd& theta) {
  double lp = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    double t = prior_logpdf1(params[i].prior, theta[static_cast<Index>(i)]);
    if (t == -kInf) return -kInf;
    lp += t;
  }
  return lp;
}

VectorXd prior_sample(const std::vector<ScalarParam>& params, Rng& rng) {
  VectorXd out(static_cast<Index>(params.size()));
  for (size_t i = 0; i < params.size(); ++i)
    out[static_cast<Index>(i)] = prior_sample1(params[i].prior, rng);
  return out;
}

}  // namespace specmc

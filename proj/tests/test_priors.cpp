#include <cmath>

#include "doctest.h"
#include "specmc/priors.hpp"

using namespace specmc;

TEST_CASE("validate_prior rejects bad hyperparameters") {
  CHECK_THROWS_AS(validate_prior(NormalPrior{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_prior(NormalPrior{0.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_prior(GammaPrior{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_prior(GammaPrior{1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_prior(UniformPrior{1.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate_prior(NormalPrior{0.0, 2.0}));
  CHECK_NOTHROW(validate_prior(GammaPrior{0.5, 3.0}));
  CHECK_NOTHROW(validate_prior(UniformPrior{-1.0, 1.0}));
}

TEST_CASE("prior_logpdf1 closed forms") {
  // standard normal at 0: -log(sqrt(2 pi))
  CHECK(prior_logpdf1(NormalPrior{0.0, 1.0}, 0.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
  // normal(1, 4) at 3: -0.5*log(8 pi) - 4/8
  CHECK(prior_logpdf1(NormalPrior{1.0, 4.0}, 3.0) ==
        doctest::Approx(-0.5 * std::log(8.0 * M_PI) - 0.5).epsilon(1e-14));
  // gamma(2, 3): pdf = 9 x exp(-3x), so log pdf(1) = log 9 - 3
  CHECK(prior_logpdf1(GammaPrior{2.0, 3.0}, 1.0) ==
        doctest::Approx(std::log(9.0) - 3.0).epsilon(1e-14));
  CHECK(prior_logpdf1(GammaPrior{2.0, 3.0}, -0.5) == -kInf);
  CHECK(prior_logpdf1(GammaPrior{2.0, 3.0}, 0.0) == -kInf);
  // uniform(2, 4)
  CHECK(prior_logpdf1(UniformPrior{2.0, 4.0}, 3.0) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  CHECK(prior_logpdf1(UniformPrior{2.0, 4.0}, 4.5) == -kInf);
  CHECK(prior_logpdf1(UniformPrior{2.0, 4.0}, 1.0) == -kInf);
}

TEST_CASE("prior_scale closed forms") {
  CHECK(prior_scale(NormalPrior{7.0, 4.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(prior_scale(GammaPrior{4.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prior_scale(UniformPrior{0.0, 12.0}) ==
        doctest::Approx(12.0 / std::sqrt(12.0)).epsilon(1e-14));
}

TEST_CASE("parse_prior round trip and errors") {
  for (const char* text : {"normal(1.5,0.2)", "gamma(5,5)", "uniform(-2,3.5)"}) {
    PriorSpec p = parse_prior(text);
    PriorSpec q = parse_prior(prior_to_string(p));
    CHECK(p.index() == q.index());
    CHECK(prior_logpdf1(p, 0.7) == prior_logpdf1(q, 0.7));
  }
  CHECK(std::holds_alternative<NormalPrior>(parse_prior(" normal( 2 , 1 ) ")));
  CHECK_THROWS_AS(parse_prior("cauchy(0,1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_prior("normal(1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_prior("normal(1,2,3)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_prior("normal(a,b)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_prior("uniform(3,1)"), std::invalid_argument);
}

TEST_CASE("prior_sample1 moments and support") {
  Rng rng(19);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = prior_sample1(NormalPrior{1.5, 0.04}, rng);
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n - 1.5) < 0.01);
  CHECK(std::abs((s2 / n - (s / n) * (s / n)) - 0.04) < 0.005);

  s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = prior_sample1(GammaPrior{5.0, 5.0}, rng);
    CHECK(x > 0.0);
    s += x;
  }
  CHECK(std::abs(s / n - 1.0) < 0.01);

  for (int i = 0; i < 1000; ++i) {
    const double x = prior_sample1(UniformPrior{2.0, 4.0}, rng);
    CHECK(x >= 2.0);
    CHECK(x < 4.0);
  }
}

TEST_CASE("vector prior helpers") {
  std::vector<ScalarParam> params = {{"a", NormalPrior{0.0, 1.0}},
                                     {"b", UniformPrior{0.0, 2.0}},
                                     {"c", GammaPrior{2.0, 3.0}}};
  VectorXd theta(3);
  theta << 0.3, 1.0, 0.5;
  const double expect = prior_logpdf1(params[0].prior, 0.3) +
                        prior_logpdf1(params[1].prior, 1.0) +
                        prior_logpdf1(params[2].prior, 0.5);
  CHECK(prior_logpdf(params, theta) == doctest::Approx(expect).epsilon(1e-14));

  theta[1] = -1.0;  // outside the uniform support
  CHECK(prior_logpdf(params, theta) == -kInf);

  Rng rng(5);
  VectorXd draw = prior_sample(params, rng);
  REQUIRE(draw.size() == 3);
  CHECK(prior_logpdf(params, draw) > -kInf);

  // same rng state, same draw
  Rng rng2(5);
  VectorXd draw2 = prior_sample(params, rng2);
  CHECK(draw == draw2);
}

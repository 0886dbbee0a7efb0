#include <cmath>

#include "conjugate_oracle.hpp"
#include "doctest.h"
#include "specmc/smc.hpp"

using namespace specmc;
using specmc_tests::Conjugate;
using specmc_tests::make_conjugate;

TEST_CASE("config validation") {
  SmcConfig cfg;
  CHECK_NOTHROW(validate_smc_config(cfg));
  SmcConfig bad = cfg;
  bad.T = 1;
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.T = 1001;  // not divisible by n = 10
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.T = 10;
  bad.n = 10;  // S = 1
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.ess_target = 1.0;
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.ess_target = 0.0;
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.max_levels = 0;
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.workers = -1;
  CHECK_THROWS_AS(validate_smc_config(bad), std::invalid_argument);
}

TEST_CASE("effective sample size oracle") {
  ArrayXd lw(3);
  lw << std::log(0.5), std::log(0.25), std::log(0.25);
  CHECK(ess(lw) == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  // scale invariance in log space
  CHECK(ess(lw + 7.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-13));

  ArrayXd uni = ArrayXd::Zero(50);
  CHECK(ess(uni) == doctest::Approx(50.0).epsilon(1e-13));

  ArrayXd one(3);
  one << 0.0, -kInf, -kInf;
  CHECK(ess(one) == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(ess(ArrayXd::Constant(4, -kInf)), std::runtime_error);
}

TEST_CASE("incremental weights: zero step gives exact zeros") {
  ParticleEnsemble ens;
  ens.energies.resize(3);
  ens.energies << 1.0, kInf, 2.5;
  ArrayXd w0 = incremental_log_weights(ens, 0.0, 100.0);
  for (Index i = 0; i < 3; ++i) CHECK(w0[i] == 0.0);
  ArrayXd w = incremental_log_weights(ens, 0.1, 100.0);
  CHECK(w[0] == doctest::Approx(-10.0).epsilon(1e-13));
  CHECK(w[1] == -kInf);
  CHECK(w[2] == doctest::Approx(-25.0).epsilon(1e-13));
}

TEST_CASE("tempering step solves the two-atom ESS equation") {
  // weights {1, q}, q = exp(-delta e): ESS ratio (1+q)^2 / (2(1+q^2))
  // at target 3/4 the positive root is q = 2 - sqrt(3)
  ArrayXd energies(2);
  energies << 0.0, 10.0;
  const double q = 2.0 - std::sqrt(3.0);
  const double delta_expect = -std::log(q) / 10.0;
  const double b = next_beta(energies, 1.0, 0.0, 0.75);
  CHECK(b == doctest::Approx(delta_expect).epsilon(1e-4));

  // restart from a later level
  const double b2 = next_beta(energies, 1.0, 0.5, 0.75);
  CHECK(b2 == doctest::Approx(0.5 + delta_expect).epsilon(1e-4));

  // equal energies keep ESS at 1: the full jump is taken exactly
  ArrayXd flat = ArrayXd::Constant(5, 3.7);
  CHECK(next_beta(flat, 50.0, 0.3, 0.5) == 1.0);

  CHECK_THROWS_AS(next_beta(energies, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("systematic resampling hits integer expected counts exactly") {
  ArrayXd lw(4);
  lw << std::log(0.5), std::log(0.25), std::log(0.125), std::log(0.125);
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto idx = systematic_resample(lw, 8, rng);
    REQUIRE(idx.size() == 8);
    int count[4] = {0, 0, 0, 0};
    for (size_t j = 0; j + 1 < idx.size(); ++j) CHECK(idx[j] <= idx[j + 1]);
    for (Index i : idx) count[i]++;
    CHECK(count[0] == 4);
    CHECK(count[1] == 2);
    CHECK(count[2] == 1);
    CHECK(count[3] == 1);
  }
}

TEST_CASE("systematic resampling is unbiased for fractional counts") {
  ArrayXd lw(2);
  lw << std::log(0.7), std::log(0.3);
  Rng rng(11);
  double total0 = 0.0;
  const int reps = 4000;
  for (int rep = 0; rep < reps; ++rep) {
    auto idx = systematic_resample(lw, 3, rng);
    int c0 = 0;
    for (Index i : idx) c0 += (i == 0);
    CHECK(c0 >= 2);  // floor(3 * 0.7)
    CHECK(c0 <= 3);  // ceil(3 * 0.7)
    total0 += c0;
  }
  CHECK(total0 / reps == doctest::Approx(2.1).epsilon(0.02));
}

TEST_CASE("free energy matches the conjugate closed form") {
  Conjugate c = make_conjugate(20, 404);
  SmcConfig cfg;
  cfg.T = 2000;
  cfg.n = 10;
  cfg.ess_target = 0.6;
  cfg.seed = 7;
  SmcResult res = smc_run(c.problem(), cfg);
  CHECK(!res.diverged);
  CHECK(std::abs(res.F - c.exact_F()) < 0.15);
  // every level runs exactly T component sweeps and keeps the ensemble size
  for (const auto& lv : res.levels) CHECK(lv.sweeps == cfg.T);
  CHECK(res.thetas.cols() == cfg.T);
  CHECK(res.levels.back().beta == 1.0);
  for (size_t i = 1; i < res.levels.size(); ++i)
    CHECK(res.levels[i].beta > res.levels[i - 1].beta);
}

TEST_CASE("one-level run reduces to plain importance sampling, bitwise") {
  Conjugate c = make_conjugate(12, 1001);
  Problem p = c.problem();
  SmcConfig cfg;
  cfg.T = 100;
  cfg.n = 5;
  cfg.ess_target = 1e-9;  // any positive ESS passes: single full jump
  cfg.seed = 99;

  SmcResult res = smc_run(p, cfg);
  REQUIRE(res.levels.size() == 1);

  ThreadPool pool(1);
  ParticleEnsemble ens = init_ensemble(p, cfg, pool);
  const ArrayXd lw = incremental_log_weights(ens, 1.0, p.n_data);
  const double f_is = -log_mean_exp(lw);
  CHECK(res.F == f_is);
}

TEST_CASE("results are bit-identical across worker counts") {
  Conjugate c = make_conjugate(15, 2024);
  Problem p = c.problem();
  SmcConfig cfg;
  cfg.T = 400;
  cfg.n = 5;
  cfg.seed = 3;

  cfg.workers = 1;
  SmcResult r1 = smc_run(p, cfg);
  cfg.workers = 3;
  SmcResult r3 = smc_run(p, cfg);
  cfg.workers = 0;  // hardware
  SmcResult rh = smc_run(p, cfg);

  CHECK(r1.F == r3.F);
  CHECK(r1.F == rh.F);
  REQUIRE(r1.thetas.cols() == r3.thetas.cols());
  for (Index j = 0; j < r1.thetas.cols(); ++j)
    CHECK(r1.thetas(0, j) == r3.thetas(0, j));
  REQUIRE(r1.levels.size() == r3.levels.size());
  for (size_t i = 0; i < r1.levels.size(); ++i) {
    CHECK(r1.levels[i].beta == r3.levels[i].beta);
    CHECK(r1.levels[i].log_mean_w == r3.levels[i].log_mean_w);
  }
}

TEST_CASE("level cap aborts a run that cannot reach beta = 1") {
  Conjugate c = make_conjugate(200, 5);  // sharp posterior: needs many levels
  SmcConfig cfg;
  cfg.T = 100;
  cfg.n = 5;
  cfg.ess_target = 0.95;
  cfg.max_levels = 2;
  CHECK_THROWS_AS(smc_run(c.problem(), cfg), std::runtime_error);
}

TEST_CASE("report wrapper carries diagnostics and the posterior block") {
  Spectrum data;
  data.xs = ArrayXd::LinSpaced(40, 0.0, 3.0);
  Rng noise(8);
  data.ys.resize(40);
  for (Index i = 0; i < 40; ++i)
    data.ys[i] = 0.6 * std::exp(-0.5 * 90.0 * (data.xs[i] - 1.4) * (data.xs[i] - 1.4)) +
                 0.1 * noise.normal();
  ModelSpec spec = gm_model(1, 0.0, 3.0, 0.1, GmMuPrior::Normal15);
  SmcConfig cfg;
  cfg.T = 300;
  cfg.n = 5;
  cfg.seed = 21;
  RunReport r = smc_run(spec, data, cfg);
  CHECK(r.sampler == "smc");
  CHECK(std::isfinite(r.F));
  REQUIRE(r.param_names.size() == 3);
  CHECK(r.param_names[1] == "mu1");
  CHECK(r.scalars.at("T") == 300.0);
  CHECK(r.scalars.at("n_data") == 40.0);
  const VectorXd& ladder = r.arrays.at("ladder");
  CHECK(ladder[0] == 0.0);
  CHECK(ladder[ladder.size() - 1] == 1.0);
  CHECK(r.scalars.at("levels") == static_cast<double>(ladder.size() - 1));
  CHECK(r.posterior.rows() == 3);
  CHECK(r.posterior.cols() == 300);
  CHECK(r.arrays.at("level_ess_ratio").size() == ladder.size() - 1);
}

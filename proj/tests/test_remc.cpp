#include <cmath>

#include "conjugate_oracle.hpp"
#include "doctest.h"
#include "specmc/remc.hpp"

using namespace specmc;
using specmc_tests::Conjugate;
using specmc_tests::make_conjugate;

namespace {

// minimal two-replica state for exercising the swap kernel in isolation
RemcState two_replica_state(double e0, double e1, double n_data = 1.0) {
  RemcState st;
  st.ladder.resize(2);
  st.ladder << 0.0, 1.0;
  st.n_data = n_data;
  st.energies.resize(2);
  st.energies << e0, e1;
  VectorXd a(1), b(1);
  a << 10.0;
  b << 20.0;
  st.thetas = {a, b};
  st.evals.resize(2);  // swap only exchanges the slots; null is fine here
  st.swap_accepts = Eigen::ArrayXi::Zero(1);
  st.swap_attempts = Eigen::ArrayXi::Zero(1);
  return st;
}

}  // namespace

TEST_CASE("geometric ladder endpoints and spacing") {
  VectorXd b = geometric_ladder(44);
  REQUIRE(b.size() == 45);
  CHECK(b[0] == 0.0);
  CHECK(b[44] == 1.0);
  CHECK(b[1] == doctest::Approx(1e-5).epsilon(1e-12));
  for (Index j = 1; j < 44; ++j) CHECK(b[j + 1] > b[j]);
  // constant ratio on the geometric part
  const double rho = std::pow(10.0, 5.0 / 43.0);
  for (Index j = 1; j < 44; ++j)
    CHECK(b[j + 1] / b[j] == doctest::Approx(rho).epsilon(1e-10));

  VectorXd tiny = geometric_ladder(1);
  REQUIRE(tiny.size() == 2);
  CHECK(tiny[0] == 0.0);
  CHECK(tiny[1] == 1.0);
  CHECK_THROWS_AS(geometric_ladder(0), std::invalid_argument);
}

TEST_CASE("explicit ladders are validated and override L") {
  RemcConfig cfg;
  cfg.L = 7;  // ignored once a ladder is given
  cfg.ladder.resize(3);
  cfg.ladder << 0.0, 0.3, 1.0;
  VectorXd b = remc_ladder(cfg);
  REQUIRE(b.size() == 3);
  CHECK(b[1] == 0.3);

  cfg.ladder << 0.1, 0.3, 1.0;
  CHECK_THROWS_AS(remc_ladder(cfg), std::invalid_argument);
  cfg.ladder << 0.0, 0.3, 0.9;
  CHECK_THROWS_AS(remc_ladder(cfg), std::invalid_argument);
  cfg.ladder << 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(remc_ladder(cfg), std::invalid_argument);

  RemcConfig geo;
  geo.L = 5;
  CHECK(remc_ladder(geo).size() == 6);
}

TEST_CASE("config validation") {
  RemcConfig cfg;
  CHECK_NOTHROW(validate_remc_config(cfg));
  RemcConfig bad = cfg;
  bad.total_sweeps = 0;
  CHECK_THROWS_AS(validate_remc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.burn_in_fraction = 0.0;
  CHECK_THROWS_AS(validate_remc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.burn_in_fraction = 1.0;
  CHECK_THROWS_AS(validate_remc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.swap_period = 0;
  CHECK_THROWS_AS(validate_remc_config(bad), std::invalid_argument);
  bad = cfg;
  bad.workers = -2;
  CHECK_THROWS_AS(validate_remc_config(bad), std::invalid_argument);
}

TEST_CASE("swap acceptance matches the analytic probability") {
  // dbeta = 1, N = 1, E1 - E0 = -0.3: accept with probability exp(-0.3)
  Rng rng(17);
  int accepts = 0;
  const int reps = 40000;
  for (int rep = 0; rep < reps; ++rep) {
    RemcState st = two_replica_state(1.0, 0.7);
    swap_step(st, 0, rng);
    CHECK(st.swap_attempts[0] == 1);
    accepts += st.swap_accepts[0];
  }
  CHECK(static_cast<double>(accepts) / reps ==
        doctest::Approx(std::exp(-0.3)).epsilon(0.015));
}

TEST_CASE("energy-lowering swaps always fire and exchange the pair state") {
  Rng rng(3);
  RemcState st = two_replica_state(1.0, 1.5);
  swap_step(st, 0, rng);
  CHECK(st.swap_accepts[0] == 1);
  CHECK(st.energies[0] == 1.5);
  CHECK(st.energies[1] == 1.0);
  CHECK(st.thetas[0][0] == 20.0);
  CHECK(st.thetas[1][0] == 10.0);

  // the wrong parity leaves the single pair untouched
  RemcState st2 = two_replica_state(1.0, 1.5);
  swap_step(st2, 1, rng);
  CHECK(st2.swap_attempts[0] == 0);
  CHECK(st2.thetas[0][0] == 10.0);
}

TEST_CASE("swap parity partitions the pairs") {
  RemcState st;
  st.ladder.resize(4);
  st.ladder << 0.0, 0.2, 0.6, 1.0;
  st.n_data = 1.0;
  st.energies.resize(4);
  st.energies << 1.0, 2.0, 3.0, 4.0;  // every attempt accepts
  VectorXd v(1);
  for (int l = 0; l < 4; ++l) {
    v << static_cast<double>(l);
    st.thetas.push_back(v);
  }
  st.evals.resize(4);
  st.swap_accepts = Eigen::ArrayXi::Zero(3);
  st.swap_attempts = Eigen::ArrayXi::Zero(3);
  Rng rng(1);
  swap_step(st, 0, rng);  // pairs (0,1) and (2,3)
  CHECK(st.swap_attempts[0] == 1);
  CHECK(st.swap_attempts[1] == 0);
  CHECK(st.swap_attempts[2] == 1);
  swap_step(st, 1, rng);  // pair (1,2) only
  CHECK(st.swap_attempts[1] == 1);
  CHECK(st.swap_attempts[0] == 1);
}

TEST_CASE("infinite energies degrade to rejections, not poison") {
  Rng rng(9);
  RemcState both = two_replica_state(kInf, kInf);
  swap_step(both, 0, rng);  // NaN log-ratio compares false
  CHECK(both.swap_accepts[0] == 0);
  CHECK(both.thetas[0][0] == 10.0);

  RemcState upper_bad = two_replica_state(1.0, kInf);
  swap_step(upper_bad, 0, rng);  // +inf ratio: the bad state moves hotter
  CHECK(upper_bad.swap_accepts[0] == 1);
  CHECK(upper_bad.energies[0] == kInf);

  RemcState lower_bad = two_replica_state(kInf, 1.0);
  swap_step(lower_bad, 0, rng);  // -inf ratio: never accepted
  CHECK(lower_bad.swap_accepts[0] == 0);
}

TEST_CASE("free energy from primed accumulators") {
  std::vector<LogMeanAcc> accs(2);
  accs[0].add(-2.0);
  accs[1].add(-3.0);
  CHECK(free_energy_remc(accs) == doctest::Approx(5.0).epsilon(1e-14));

  std::vector<LogMeanAcc> zero(3);
  for (auto& a : zero) a.add(0.0);
  CHECK(free_energy_remc(zero) == 0.0);

  std::vector<LogMeanAcc> empty(1);
  CHECK_THROWS_AS(free_energy_remc(empty), std::runtime_error);
}

TEST_CASE("free energy matches the conjugate closed form") {
  Conjugate c = make_conjugate(20, 404);
  RemcConfig cfg;
  cfg.L = 20;
  cfg.total_sweeps = 4000;
  cfg.seed = 13;
  RemcResult res = remc_run(c.problem(), cfg);
  CHECK(!res.diverged);
  CHECK(std::abs(res.F - c.exact_F()) < 0.3);
  CHECK(res.posterior.cols() == 2000);
  CHECK(res.swap_rate.size() == 20);
  CHECK(res.replica_acc.size() == 21);
  for (Index l = 0; l < 20; ++l) {
    CHECK(res.swap_rate[l] >= 0.0);
    CHECK(res.swap_rate[l] <= 1.0);
  }
  for (Index l = 0; l < 21; ++l) {
    CHECK(res.replica_acc[l] > 0.0);
    CHECK(res.replica_acc[l] <= 1.0);
  }
  // retained draws sample the beta = 1 posterior
  const double mean = res.posterior.row(0).mean();
  CHECK(std::abs(mean - c.post_mean()) < 4.0 * std::sqrt(c.post_var()));
}

TEST_CASE("disabling swaps yields independent per-level chains") {
  Conjugate c = make_conjugate(10, 7);
  RemcConfig cfg;
  cfg.L = 4;
  cfg.total_sweeps = 600;
  cfg.swap_period = 601;  // beyond the run: swaps never trigger
  cfg.seed = 2;
  RemcResult res = remc_run(c.problem(), cfg);
  for (Index l = 0; l < res.swap_rate.size(); ++l) CHECK(res.swap_rate[l] == 0.0);
  CHECK(std::isfinite(res.F));
}

TEST_CASE("results are bit-identical across worker counts") {
  Conjugate c = make_conjugate(15, 2024);
  Problem p = c.problem();
  RemcConfig cfg;
  cfg.L = 6;
  cfg.total_sweeps = 500;
  cfg.seed = 31;

  cfg.workers = 1;
  RemcResult r1 = remc_run(p, cfg);
  cfg.workers = 3;
  RemcResult r3 = remc_run(p, cfg);
  cfg.workers = 0;
  RemcResult rh = remc_run(p, cfg);

  CHECK(r1.F == r3.F);
  CHECK(r1.F == rh.F);
  REQUIRE(r1.posterior.cols() == r3.posterior.cols());
  for (Index j = 0; j < r1.posterior.cols(); ++j)
    CHECK(r1.posterior(0, j) == r3.posterior(0, j));
  for (Index l = 0; l < r1.swap_rate.size(); ++l)
    CHECK(r1.swap_rate[l] == r3.swap_rate[l]);
}

TEST_CASE("an unreachable likelihood flags divergence instead of a bogus F") {
  auto p = make_custom_problem({{"x", UniformPrior{0.0, 1.0}}}, 5.0,
                               [](const VectorXd&) { return kInf; });
  RemcConfig cfg;
  cfg.L = 3;
  cfg.total_sweeps = 50;
  RemcResult res = remc_run(p, cfg);
  CHECK(res.diverged);
  CHECK(std::isnan(res.F));
}

TEST_CASE("report wrapper carries ladder diagnostics") {
  Spectrum data;
  data.xs = ArrayXd::LinSpaced(40, 0.0, 3.0);
  Rng noise(8);
  data.ys.resize(40);
  for (Index i = 0; i < 40; ++i)
    data.ys[i] = 0.6 * std::exp(-0.5 * 90.0 * (data.xs[i] - 1.4) * (data.xs[i] - 1.4)) +
                 0.1 * noise.normal();
  ModelSpec spec = gm_model(1, 0.0, 3.0, 0.1, GmMuPrior::Normal15);
  RemcConfig cfg;
  cfg.L = 8;
  cfg.total_sweeps = 400;
  cfg.seed = 6;
  RunReport r = remc_run(spec, data, cfg);
  CHECK(r.sampler == "remc");
  CHECK(std::isfinite(r.F));
  CHECK(r.scalars.at("L") == 8.0);
  CHECK(r.scalars.at("total_sweeps") == 400.0);
  const VectorXd& ladder = r.arrays.at("ladder");
  REQUIRE(ladder.size() == 9);
  CHECK(ladder[0] == 0.0);
  CHECK(ladder[8] == 1.0);
  CHECK(r.arrays.at("swap_rate").size() == 8);
  CHECK(r.arrays.at("replica_acc_rate").size() == 9);
  CHECK(r.posterior.rows() == 3);
  CHECK(r.posterior.cols() == 200);
}

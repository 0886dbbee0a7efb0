#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "conjugate_oracle.hpp"
#include "doctest.h"
#include "specmc/bench.hpp"
#include "specmc/report.hpp"

using namespace specmc;
using specmc_tests::make_conjugate;

namespace {

bool bit_eq(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

RunReport fake_run(const std::string& label, const std::string& sampler, double F, double secs,
                   double budget, bool diverged = false) {
  RunReport r;
  r.label = label;
  r.sampler = sampler;
  r.F = F;
  r.diverged = diverged;
  r.wall_seconds = secs;
  if (sampler == "smc")
    r.scalars["T"] = budget;
  else
    r.scalars["total_sweeps"] = budget;
  return r;
}

// four-condition grid with power-of-two F offsets so the log-log
// interpolation lands on exact values
std::vector<RunReport> speedup_fixture(double remc_f) {
  std::vector<RunReport> runs;
  for (int t = 0; t < 2; ++t) runs.push_back(fake_run("smc_T100", "smc", 10.25, 1.0, 100));
  for (int t = 0; t < 2; ++t) runs.push_back(fake_run("smc_T1000", "smc", 10.0625, 4.0, 1000));
  for (int t = 0; t < 2; ++t) runs.push_back(fake_run("smc_T4000", "smc", 10.0, 16.0, 4000));
  for (int t = 0; t < 2; ++t) runs.push_back(fake_run("remc_s500", "remc", remc_f, 8.0, 500));
  return runs;
}

}  // namespace

TEST_CASE("trial seeds depend only on base and trial index") {
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 100; ++t) seen.insert(trial_seed(123, t));
  CHECK(seen.size() == 100);
  CHECK(trial_seed(123, 7) == trial_seed(123, 7));
  CHECK(trial_seed(123, 7) != trial_seed(124, 7));
}

TEST_CASE("median_of handles odd, even and empty inputs") {
  CHECK(std::isnan(median_of({})));
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median_of({5.0}) == 5.0);
}

TEST_CASE("table aggregates trial statistics against the auto reference") {
  auto runs = speedup_fixture(10.125);
  BenchTable tab = table_from_reports(runs);

  CHECK(tab.reference_label == "smc_T4000");
  CHECK(tab.f_ref == 10.0);
  CHECK(tab.timings_comparable);
  REQUIRE(tab.rows.size() == 4);
  CHECK(tab.rows[0].label == "smc_T100");
  CHECK(tab.rows[3].label == "remc_s500");
  for (const auto& row : tab.rows) {
    CHECK(row.trials == 2);
    CHECK(row.divergent == 0);
    CHECK(row.f_std == 0.0);
    CHECK(row.time_std == 0.0);
  }
  CHECK(tab.rows[0].df_mean == 0.25);
  CHECK(tab.rows[1].df_mean == 0.0625);
  CHECK(tab.rows[2].df_mean == 0.0);
  CHECK(tab.rows[3].df_mean == 0.125);
  CHECK(tab.rows[0].df_median == 0.25);
  CHECK(tab.rows[0].time_mean == 1.0);
  CHECK(tab.rows[3].time_mean == 8.0);
}

TEST_CASE("speedup interpolates the error-time curve in log-log space") {
  // remc error 0.125 sits halfway between 0.0625 (4s) and 0.25 (1s) on the
  // log scale, so the interpolated time is 2s and the speedup 8/2 = 4
  BenchTable tab = table_from_reports(speedup_fixture(10.125));
  CHECK(tab.speedup == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("speedup clamps when the REMC error leaves the curve") {
  SUBCASE("below the smallest SMC error") {
    // err 0.03125 < 0.0625 so the time clamps to 4s; speedup 8/4
    BenchTable tab = table_from_reports(speedup_fixture(10.03125));
    CHECK(tab.speedup == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("above the largest SMC error") {
    // err 0.5 > 0.25 so the time clamps to 1s; speedup 8/1
    BenchTable tab = table_from_reports(speedup_fixture(10.5));
    CHECK(tab.speedup == doctest::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("an explicit reference label overrides the largest-T rule") {
  auto runs = speedup_fixture(10.125);
  BenchTable tab = table_from_reports(runs, "smc_T100");
  CHECK(tab.reference_label == "smc_T100");
  CHECK(tab.f_ref == 10.25);
}

TEST_CASE("divergent trials are counted and excluded from statistics") {
  std::vector<RunReport> runs;
  runs.push_back(fake_run("c", "smc", 5.0, 1.0, 10));
  runs.push_back(fake_run("c", "smc", 5.0, 1.0, 10, true));
  runs.push_back(fake_run("c", "smc", kInf, 1.0, 10));  // non-finite counts too

  BenchTable tab = table_from_reports(runs);
  REQUIRE(tab.rows.size() == 1);
  CHECK(tab.rows[0].trials == 3);
  CHECK(tab.rows[0].divergent == 2);
  CHECK(tab.rows[0].f_mean == 5.0);
  CHECK(tab.rows[0].f_std == 0.0);
  CHECK(tab.f_ref == 5.0);
}

TEST_CASE("table construction rejects malformed run sets") {
  CHECK_THROWS_AS(table_from_reports({}), std::invalid_argument);

  std::vector<RunReport> mixed;
  mixed.push_back(fake_run("x", "smc", 1.0, 1.0, 10));
  mixed.push_back(fake_run("x", "remc", 1.0, 1.0, 10));
  CHECK_THROWS_AS(table_from_reports(mixed), std::invalid_argument);

  std::vector<RunReport> ok = {fake_run("a", "smc", 1.0, 1.0, 10)};
  CHECK_THROWS_AS(table_from_reports(ok, "nope"), std::invalid_argument);

  std::vector<RunReport> allbad = {fake_run("a", "smc", 1.0, 1.0, 10, true),
                                   fake_run("a", "smc", 2.0, 1.0, 10, true)};
  CHECK_THROWS_AS(table_from_reports(allbad), std::runtime_error);

  std::vector<RunReport> remc_only = {fake_run("r", "remc", 1.0, 1.0, 10)};
  CHECK_THROWS_AS(table_from_reports(remc_only), std::invalid_argument);
}

TEST_CASE("table text carries the reference header and the parallel marker") {
  BenchTable tab = table_from_reports(speedup_fixture(10.125));
  std::string txt = bench_table_text(tab);
  CHECK(txt.find("# reference smc_T4000") != std::string::npos);
  CHECK(txt.find("label\tsampler\ttrials\tdivergent") != std::string::npos);
  CHECK(txt.find("smc_T1000\tsmc\t2\t0") != std::string::npos);
  CHECK(txt.find("non-comparable") == std::string::npos);

  tab.timings_comparable = false;
  txt = bench_table_text(tab);
  CHECK(txt.find("# timings non-comparable (parallel trials)") != std::string::npos);
}

namespace {

RunReport ci_report(const std::string& label, const std::vector<std::string>& names,
                    const std::vector<double>& shifts, bool diverged = false) {
  RunReport r;
  r.label = label;
  r.sampler = "smc";
  r.F = 1.0;
  r.diverged = diverged;
  r.wall_seconds = 3.0;
  r.param_names = names;
  r.posterior.resize(static_cast<Index>(names.size()), 100);
  for (Index i = 0; i < r.posterior.rows(); ++i)
    for (Index j = 0; j < 100; ++j)
      r.posterior(i, j) = double(j) * double(i + 1) + shifts[static_cast<size_t>(i)];
  return r;
}

}  // namespace

TEST_CASE("interval error is the exact endpoint displacement") {
  const std::vector<std::string> names = {"A1", "mu1", "mu2"};
  RunReport ref = ci_report("ref", names, {0.0, 0.0, 0.0});

  SUBCASE("exact name matches one component") {
    // shifting every draw by 1 moves both interval ends by exactly 1
    std::vector<RunReport> runs = {ci_report("a", names, {9.0, 1.0, 0.0}),
                                   ci_report("a", names, {9.0, 1.0, 0.0})};
    auto rows = ci_error_curve(runs, ref, "mu1");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trials == 2);
    CHECK(rows[0].divergent == 0);
    CHECK(rows[0].err_mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rows[0].err_std == 0.0);
    CHECK(rows[0].err_median == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rows[0].time_mean == 3.0);
  }

  SUBCASE("a bare stem averages over numbered components") {
    // mu1 shifted by 1 (err 2) and mu2 by 3 (err 6): mean 4
    std::vector<RunReport> runs = {ci_report("a", names, {0.0, 1.0, 3.0})};
    auto rows = ci_error_curve(runs, ref, "mu");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].err_mean == doctest::Approx(4.0).epsilon(1e-12));
  }

  SUBCASE("divergent trials are skipped but counted") {
    std::vector<RunReport> runs = {ci_report("a", names, {0.0, 1.0, 1.0}),
                                   ci_report("a", names, {0.0, 5.0, 5.0}, true)};
    auto rows = ci_error_curve(runs, ref, "mu");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trials == 2);
    CHECK(rows[0].divergent == 1);
    CHECK(rows[0].err_mean == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("unknown parameters and mismatched sets are rejected") {
    std::vector<RunReport> runs = {ci_report("a", names, {0.0, 0.0, 0.0})};
    CHECK_THROWS_AS(ci_error_curve(runs, ref, "gamma"), std::invalid_argument);

    std::vector<RunReport> short_runs = {ci_report("a", {"A1", "mu1"}, {0.0, 0.0})};
    CHECK_THROWS_AS(ci_error_curve(short_runs, ref, "mu"), std::invalid_argument);

    RunReport empty_ref;
    empty_ref.param_names = names;
    CHECK_THROWS_AS(ci_error_curve(runs, empty_ref, "mu"), std::invalid_argument);
  }

  SUBCASE("table text lists one row per condition") {
    std::vector<RunReport> runs = {ci_report("a", names, {0.0, 1.0, 1.0}),
                                   ci_report("b", names, {0.0, 2.0, 2.0})};
    auto rows = ci_error_curve(runs, ref, "mu");
    std::string txt = ci_table_text(rows);
    CHECK(txt.find("condition\ttrials\tdivergent") != std::string::npos);
    CHECK(txt.find("a\t1\t0") != std::string::npos);
    CHECK(txt.find("b\t1\t0") != std::string::npos);
  }
}

TEST_CASE("benchmark runs the grid and regenerates bit-identically from disk") {
  auto conj = make_conjugate(10, 2024);
  Problem prob = conj.problem();

  SmcConfig smc;
  smc.T = 200;
  smc.n = 5;
  smc.ess_target = 0.5;
  smc.workers = 1;
  RemcConfig remc;
  remc.L = 4;
  remc.total_sweeps = 200;
  remc.burn_in_fraction = 0.5;
  remc.swap_period = 1;
  remc.workers = 1;

  std::vector<BenchCondition> grid(3);
  grid[0] = {"smc_a", "smc", smc, remc};
  grid[1] = {"smc_b", "smc", smc, remc};
  grid[2] = {"remc_c", "remc", smc, remc};

  CHECK_THROWS_AS(benchmark(prob, grid, 1, 99), std::invalid_argument);
  CHECK_THROWS_AS(benchmark(prob, {}, 2, 99), std::invalid_argument);

  BenchResult res = benchmark(prob, grid, 2, 99);
  REQUIRE(res.runs.size() == 6);

  // condition-major layout with per-trial seeds shared across conditions
  CHECK(res.runs[0].label == "smc_a");
  CHECK(res.runs[1].label == "smc_a");
  CHECK(res.runs[2].label == "smc_b");
  CHECK(res.runs[4].label == "remc_c");
  CHECK(res.runs[0].scalars.at("trial") == 0.0);
  CHECK(res.runs[1].scalars.at("trial") == 1.0);
  CHECK(res.runs[0].scalars.at("seed") == double(trial_seed(99, 0)));
  CHECK(res.runs[0].scalars.at("T") == 200.0);
  CHECK(res.runs[4].scalars.at("total_sweeps") == 200.0);
  CHECK(res.runs[0].param_names == std::vector<std::string>{"theta"});

  // identical configs under different labels reproduce each other exactly
  CHECK(bit_eq(res.runs[0].F, res.runs[2].F));
  CHECK(bit_eq(res.runs[1].F, res.runs[3].F));
  CHECK(res.runs[0].posterior == res.runs[2].posterior);
  // distinct trial seeds actually change the run
  CHECK_FALSE(bit_eq(res.runs[0].F, res.runs[1].F));

  REQUIRE(res.table.rows.size() == 3);
  CHECK(res.table.reference_label == "smc_a");
  CHECK(bit_eq(res.table.f_ref, 0.5 * (res.runs[0].F + res.runs[1].F)));
  for (const auto& row : res.table.rows) {
    CHECK(row.trials == 2);
    CHECK(row.divergent == 0);
    CHECK(std::isfinite(row.f_mean));
  }
  // and the estimates are actually near the closed-form evidence
  const double f_exact = conj.exact_F();
  for (const auto& row : res.table.rows) CHECK(std::abs(row.f_mean - f_exact) < 1.0);

  // persist, reload, regenerate: the table must not change in any bit
  auto dir = std::filesystem::temp_directory_path() / "specmc_bench_tests";
  std::filesystem::create_directories(dir);
  std::vector<RunReport> reloaded;
  for (size_t i = 0; i < res.runs.size(); ++i) {
    const std::string p = (dir / ("run" + std::to_string(i) + ".report")).string();
    write_report(res.runs[i], p);
    reloaded.push_back(read_report(p));
  }
  BenchTable regen = table_from_reports(reloaded);
  CHECK(regen.reference_label == res.table.reference_label);
  CHECK(bit_eq(regen.f_ref, res.table.f_ref));
  CHECK(bit_eq(regen.speedup, res.table.speedup));
  REQUIRE(regen.rows.size() == res.table.rows.size());
  for (size_t i = 0; i < regen.rows.size(); ++i) {
    CHECK(regen.rows[i].label == res.table.rows[i].label);
    CHECK(regen.rows[i].trials == res.table.rows[i].trials);
    CHECK(regen.rows[i].divergent == res.table.rows[i].divergent);
    CHECK(bit_eq(regen.rows[i].f_mean, res.table.rows[i].f_mean));
    CHECK(bit_eq(regen.rows[i].f_std, res.table.rows[i].f_std));
    CHECK(bit_eq(regen.rows[i].df_mean, res.table.rows[i].df_mean));
    CHECK(bit_eq(regen.rows[i].df_median, res.table.rows[i].df_median));
    CHECK(bit_eq(regen.rows[i].time_mean, res.table.rows[i].time_mean));
    CHECK(bit_eq(regen.rows[i].time_std, res.table.rows[i].time_std));
  }

  // parallel trials keep the draws (seeds are fixed) but void the timings
  BenchResult par = benchmark(prob, grid, 2, 99, "", true);
  REQUIRE(par.runs.size() == 6);
  for (size_t i = 0; i < 6; ++i) CHECK(bit_eq(par.runs[i].F, res.runs[i].F));
  CHECK_FALSE(par.table.timings_comparable);
  CHECK(bench_table_text(par.table).find("non-comparable") != std::string::npos);
  CHECK(bench_table_text(res.table).find("non-comparable") == std::string::npos);

  std::vector<BenchCondition> bad(1);
  bad[0] = {"weird", "hmc", smc, remc};
  CHECK_THROWS_AS(benchmark(prob, bad, 2, 99), std::invalid_argument);
}

#ifndef SPECMC_BENCH_HPP
#define SPECMC_BENCH_HPP

#include "specmc/remc.hpp"
#include "specmc/smc.hpp"

namespace specmc {

struct BenchCondition {
  std::string label;
  std::string sampler;  // "smc" | "remc"
  SmcConfig smc;        // read when sampler == "smc"
  RemcConfig remc;      // read when sampler == "remc"
};

struct BenchRow {
  std::string label;
  std::string sampler;
  int trials = 0;
  int divergent = 0;  // excluded from every statistic, never dropped silently
  double f_mean = kNaN;
  double f_std = 0.0;
  double time_mean = kNaN;
  double time_std = 0.0;
  double df_mean = kNaN;    // mean over trials of |F_t - F_ref_mean|
  double df_median = kNaN;
};

struct BenchTable {
  std::string reference_label;
  double f_ref = kNaN;
  // wall time of the largest-budget REMC condition over the SMC time
  // interpolated at its error level on the log-log error-time curve
  double speedup = kNaN;
  bool timings_comparable = true;
  std::vector<BenchRow> rows;
};

struct BenchResult {
  BenchTable table;
  std::vector<RunReport> runs;  // condition-major, then trial order
};

// Trial seeds depend only on (base, trial), so every condition sees the same
// seed list.
std::uint64_t trial_seed(std::uint64_t base, int trial);

// Runs trials x grid, sequentially unless parallel_trials (which forces one
// sampler worker per run and marks timings non-comparable).
// reference_label = "" selects the SMC condition with the largest T.
BenchResult benchmark(const Problem& problem, const std::vector<BenchCondition>& grid, int trials,
                      std::uint64_t base_seed, const std::string& reference_label = "",
                      bool parallel_trials = false);
BenchResult benchmark(const ModelSpec& spec, const Spectrum& data,
                      const std::vector<BenchCondition>& grid, int trials, std::uint64_t base_seed,
                      const std::string& reference_label = "", bool parallel_trials = false);

// Rebuilds the table from persisted run reports; timing is read from the
// reports, never re-measured, so regeneration is bit-identical.
BenchTable table_from_reports(const std::vector<RunReport>& runs,
                              const std::string& reference_label = "");

struct CiErrRow {
  std::string label;
  int trials = 0;
  int divergent = 0;
  double time_mean = kNaN;
  double time_std = 0.0;
  double err_mean = kNaN;  // |lo - lo_ref| + |hi - hi_ref|, averaged over matches
  double err_std = 0.0;
  double err_median = kNaN;
};

// Per condition, the equal-tailed interval endpoint error of the named
// parameter against the reference report's interval. A bare stem ("mu")
// averages over every "mu<digits>" component.
std::vector<CiErrRow> ci_error_curve(const std::vector<RunReport>& runs,
                                     const RunReport& truth_ref, const std::string& param,
                                     double level = 0.95);

std::string bench_table_text(const BenchTable& t);
std::string ci_table_text(const std::vector<CiErrRow>& rows);

double median_of(std::vector<double> v);  // empty input gives NaN

}  // namespace specmc

#endif

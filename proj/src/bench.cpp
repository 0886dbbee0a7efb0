#include "specmc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "specmc/posterior.hpp"

namespace specmc {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct Group {
  std::string label;
  std::string sampler;
  int total = 0;
  int divergent = 0;
  std::vector<double> fs;     // finite trials only
  std::vector<double> times;  // finite trials only
  double smc_T = -kInf;
  double remc_sweeps = -kInf;
};

double scalar_or(const RunReport& r, const std::string& key, double fallback) {
  auto it = r.scalars.find(key);
  return it == r.scalars.end() ? fallback : it->second;
}

// log-log linear interpolation of time at the target error, clamped to the
// curve's ends; points without positive finite coordinates are dropped
double time_at_error(std::vector<std::pair<double, double>> pts, double err) {
  std::erase_if(pts, [](const auto& p) {
    return !(p.first > 0.0) || !(p.second > 0.0) || !std::isfinite(p.first) ||
           !std::isfinite(p.second);
  });
  if (pts.empty()) return kNaN;
  std::sort(pts.begin(), pts.end());
  if (!(err > 0.0) || err <= pts.front().first) return pts.front().second;
  if (err >= pts.back().first) return pts.back().second;
  size_t i = 1;
  while (pts[i].first < err) ++i;
  const double e0 = std::log(pts[i - 1].first), e1 = std::log(pts[i].first);
  const double t0 = std::log(pts[i - 1].second), t1 = std::log(pts[i].second);
  if (e1 == e0) return pts[i].second;
  const double w = (std::log(err) - e0) / (e1 - e0);
  return std::exp(t0 + w * (t1 - t0));
}

RunReport run_once(const Problem& problem, const BenchCondition& cond, std::uint64_t seed,
                   bool force_single_worker) {
  RunReport r;
  r.label = cond.label;
  for (const auto& p : problem.params) r.param_names.push_back(p.name);
  if (cond.sampler == "smc") {
    SmcConfig cfg = cond.smc;
    cfg.seed = seed;
    if (force_single_worker) cfg.workers = 1;
    SmcResult res = smc_run(problem, cfg);
    r.sampler = "smc";
    r.F = res.F;
    r.diverged = res.diverged;
    r.wall_seconds = res.wall_seconds;
    r.scalars["T"] = static_cast<double>(cfg.T);
    r.scalars["n"] = cfg.n;
    r.scalars["seed"] = static_cast<double>(seed);
    r.posterior = std::move(res.thetas);
  } else if (cond.sampler == "remc") {
    RemcConfig cfg = cond.remc;
    cfg.seed = seed;
    if (force_single_worker) cfg.workers = 1;
    RemcResult res = remc_run(problem, cfg);
    r.sampler = "remc";
    r.F = res.F;
    r.diverged = res.diverged;
    r.wall_seconds = res.wall_seconds;
    r.scalars["L"] = static_cast<double>(res.ladder.size() - 1);
    r.scalars["total_sweeps"] = static_cast<double>(cfg.total_sweeps);
    r.scalars["seed"] = static_cast<double>(seed);
    r.posterior = std::move(res.posterior);
  } else {
    throw std::invalid_argument("benchmark: unknown sampler '" + cond.sampler + "'");
  }
  return r;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return hash_combine(base, static_cast<std::uint64_t>(trial));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchResult benchmark(const Problem& problem, const std::vector<BenchCondition>& grid, int trials,
                      std::uint64_t base_seed, const std::string& reference_label,
                      bool parallel_trials) {
  if (trials < 2) throw std::invalid_argument("benchmark: trials must be >= 2");
  if (grid.empty()) throw std::invalid_argument("benchmark: empty condition grid");

  BenchResult out;
  out.runs.resize(grid.size() * static_cast<size_t>(trials));
  const auto run_slot = [&](std::int64_t i) {
    const size_t c = static_cast<size_t>(i) / static_cast<size_t>(trials);
    const int t = static_cast<int>(i % trials);
    RunReport rep = run_once(problem, grid[c], trial_seed(base_seed, t), parallel_trials);
    rep.scalars["trial"] = t;
    rep.scalars["parallel_trials"] = parallel_trials ? 1.0 : 0.0;
    out.runs[static_cast<size_t>(i)] = std::move(rep);
  };
  const std::int64_t total = static_cast<std::int64_t>(out.runs.size());
  if (parallel_trials) {
    ThreadPool pool(ThreadPool::hardware_workers());
    pool.for_blocks(total, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t i = lo; i < hi; ++i) run_slot(i);
    });
  } else {
    for (std::int64_t i = 0; i < total; ++i) run_slot(i);
  }
  out.table = table_from_reports(out.runs, reference_label);
  return out;
}

BenchResult benchmark(const ModelSpec& spec, const Spectrum& data,
                      const std::vector<BenchCondition>& grid, int trials, std::uint64_t base_seed,
                      const std::string& reference_label, bool parallel_trials) {
  return benchmark(make_problem(spec, data), grid, trials, base_seed, reference_label,
                   parallel_trials);
}

BenchTable table_from_reports(const std::vector<RunReport>& runs,
                              const std::string& reference_label) {
  if (runs.empty()) throw std::invalid_argument("table_from_reports: no runs");

  std::vector<std::string> order;
  std::map<std::string, Group> groups;
  bool parallel_seen = false;
  for (const auto& r : runs) {
    auto it = groups.find(r.label);
    if (it == groups.end()) {
      order.push_back(r.label);
      it = groups.emplace(r.label, Group{}).first;
      it->second.label = r.label;
      it->second.sampler = r.sampler;
    }
    Group& g = it->second;
    if (g.sampler != r.sampler)
      throw std::invalid_argument("table_from_reports: mixed samplers under label " + r.label);
    g.total += 1;
    if (r.diverged || !std::isfinite(r.F)) {
      g.divergent += 1;
    } else {
      g.fs.push_back(r.F);
      g.times.push_back(r.wall_seconds);
    }
    if (r.sampler == "smc") g.smc_T = std::max(g.smc_T, scalar_or(r, "T", -kInf));
    if (r.sampler == "remc")
      g.remc_sweeps = std::max(g.remc_sweeps, scalar_or(r, "total_sweeps", -kInf));
    if (scalar_or(r, "parallel_trials", 0.0) != 0.0) parallel_seen = true;
  }

  BenchTable table;
  table.timings_comparable = !parallel_seen;

  if (reference_label.empty()) {
    double best_T = -kInf;
    for (const auto& label : order) {
      const Group& g = groups.at(label);
      if (g.sampler == "smc" && g.smc_T > best_T) {
        best_T = g.smc_T;
        table.reference_label = label;
      }
    }
    if (table.reference_label.empty())
      throw std::invalid_argument("table_from_reports: no SMC condition for the auto reference");
  } else {
    if (!groups.count(reference_label))
      throw std::invalid_argument("table_from_reports: unknown reference label " +
                                  reference_label);
    table.reference_label = reference_label;
  }
  const Group& ref = groups.at(table.reference_label);
  if (ref.fs.empty())
    throw std::runtime_error("table_from_reports: every reference trial diverged");
  table.f_ref = mean_of(ref.fs);

  for (const auto& label : order) {
    const Group& g = groups.at(label);
    BenchRow row;
    row.label = g.label;
    row.sampler = g.sampler;
    row.trials = g.total;
    row.divergent = g.divergent;
    if (!g.fs.empty()) {
      row.f_mean = mean_of(g.fs);
      row.f_std = std_of(g.fs, row.f_mean);
      row.time_mean = mean_of(g.times);
      row.time_std = std_of(g.times, row.time_mean);
      std::vector<double> dfs;
      dfs.reserve(g.fs.size());
      for (double f : g.fs) dfs.push_back(std::abs(f - table.f_ref));
      row.df_mean = mean_of(dfs);
      row.df_median = median_of(dfs);
    }
    table.rows.push_back(std::move(row));
  }

  // speedup: largest REMC condition against the SMC error-time curve
  const BenchRow* remc_big = nullptr;
  double best_sweeps = -kInf;
  for (const auto& row : table.rows) {
    if (row.sampler != "remc") continue;
    const double sw = groups.at(row.label).remc_sweeps;
    if (sw > best_sweeps) {
      best_sweeps = sw;
      remc_big = &row;
    }
  }
  if (remc_big && std::isfinite(remc_big->df_mean) && std::isfinite(remc_big->time_mean)) {
    std::vector<std::pair<double, double>> curve;
    for (const auto& row : table.rows)
      if (row.sampler == "smc") curve.emplace_back(row.df_mean, row.time_mean);
    const double t_smc = time_at_error(std::move(curve), remc_big->df_mean);
    if (std::isfinite(t_smc) && t_smc > 0.0) table.speedup = remc_big->time_mean / t_smc;
  }
  return table;
}

std::vector<CiErrRow> ci_error_curve(const std::vector<RunReport>& runs,
                                     const RunReport& truth_ref, const std::string& param,
                                     double level) {
  const auto match_rows = [&param](const std::vector<std::string>& names) {
    std::vector<Index> rows;
    for (size_t i = 0; i < names.size(); ++i) {
      const std::string& n = names[i];
      if (n == param) {
        rows.push_back(static_cast<Index>(i));
      } else if (n.size() > param.size() && n.compare(0, param.size(), param) == 0) {
        bool digits = true;
        for (size_t j = param.size(); j < n.size(); ++j)
          if (!std::isdigit(static_cast<unsigned char>(n[j]))) digits = false;
        if (digits) rows.push_back(static_cast<Index>(i));
      }
    }
    return rows;
  };

  const std::vector<Index> ref_rows = match_rows(truth_ref.param_names);
  if (ref_rows.empty())
    throw std::invalid_argument("ci_error_curve: unknown parameter '" + param + "'");
  if (truth_ref.posterior.cols() == 0)
    throw std::invalid_argument("ci_error_curve: reference report has no posterior draws");

  const ArrayXd w_ref = ArrayXd::Ones(truth_ref.posterior.cols());
  std::vector<std::pair<double, double>> ref_ci;
  for (Index r : ref_rows)
    ref_ci.push_back(credible_interval(truth_ref.posterior.row(r).transpose().array(), w_ref,
                                       level));

  std::vector<std::string> order;
  std::map<std::string, CiErrRow> rows;
  std::map<std::string, std::vector<double>> errs, times;
  for (const auto& run : runs) {
    auto it = rows.find(run.label);
    if (it == rows.end()) {
      order.push_back(run.label);
      it = rows.emplace(run.label, CiErrRow{}).first;
      it->second.label = run.label;
    }
    CiErrRow& row = it->second;
    row.trials += 1;
    if (run.diverged || !std::isfinite(run.F) || run.posterior.cols() == 0) {
      row.divergent += 1;
      continue;
    }
    const std::vector<Index> run_rows = match_rows(run.param_names);
    if (run_rows.size() != ref_rows.size())
      throw std::invalid_argument("ci_error_curve: parameter set differs from the reference");
    const ArrayXd w = ArrayXd::Ones(run.posterior.cols());
    double err = 0.0;
    for (size_t m = 0; m < run_rows.size(); ++m) {
      const auto ci =
          credible_interval(run.posterior.row(run_rows[m]).transpose().array(), w, level);
      err += std::abs(ci.first - ref_ci[m].first) + std::abs(ci.second - ref_ci[m].second);
    }
    errs[run.label].push_back(err / static_cast<double>(run_rows.size()));
    times[run.label].push_back(run.wall_seconds);
  }

  std::vector<CiErrRow> out;
  for (const auto& label : order) {
    CiErrRow row = rows.at(label);
    const auto& e = errs[label];
    const auto& t = times[label];
    if (!e.empty()) {
      row.err_mean = mean_of(e);
      row.err_std = std_of(e, row.err_mean);
      row.err_median = median_of(e);
      row.time_mean = mean_of(t);
      row.time_std = std_of(t, row.time_mean);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string bench_table_text(const BenchTable& t) {
  std::ostringstream os;
  os << "# reference " << t.reference_label << " F_ref " << format_double(t.f_ref) << " speedup "
     << format_double(t.speedup) << "\n";
  if (!t.timings_comparable) os << "# timings non-comparable (parallel trials)\n";
  os << "label\tsampler\ttrials\tdivergent\tF_mean\tF_std\tdF_mean\tdF_median\ttime_mean\ttime_"
        "std\n";
  for (const auto& r : t.rows)
    os << r.label << "\t" << r.sampler << "\t" << r.trials << "\t" << r.divergent << "\t"
       << format_double(r.f_mean) << "\t" << format_double(r.f_std) << "\t"
       << format_double(r.df_mean) << "\t" << format_double(r.df_median) << "\t"
       << format_double(r.time_mean) << "\t" << format_double(r.time_std) << "\n";
  return os.str();
}

std::string ci_table_text(const std::vector<CiErrRow>& rows) {
  std::ostringstream os;
  os << "condition\ttrials\tdivergent\ttime_mean\ttime_std\terr_mean\terr_std\terr_median\n";
  for (const auto& r : rows)
    os << r.label << "\t" << r.trials << "\t" << r.divergent << "\t"
       << format_double(r.time_mean) << "\t" << format_double(r.time_std) << "\t"
       << format_double(r.err_mean) << "\t" << format_double(r.err_std) << "\t"
       << format_double(r.err_median) << "\n";
  return os.str();
}

}  // namespace specmc

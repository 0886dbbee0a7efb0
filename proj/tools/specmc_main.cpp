#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "specmc/bench.hpp"
#include "specmc/config.hpp"
#include "specmc/posterior.hpp"
#include "specmc/synthetic.hpp"

namespace {

using namespace specmc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;   // schema / file / usage problems
constexpr int kExitNumeric = 3;  // non-finite free energy

struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Index max_draws_of(const Config& cfg) {
  const long long m = cfg_int(cfg, "report.max_draws", 20000);
  if (m < 1) throw std::invalid_argument("config key report.max_draws: must be >= 1");
  return static_cast<Index>(m);
}

std::uint64_t base_seed_of(const Config& cfg) {
  const long long s = cfg_int(cfg, "seed", 0);
  if (s < 0) throw std::invalid_argument("config key seed: must be >= 0");
  return static_cast<std::uint64_t>(s);
}

// stable peak order plus posterior summaries; peak labels are exchangeable
// for the mixture and photoemission families
void finish_report(RunReport& r, const ModelSpec& spec) {
  if (r.posterior.cols() == 0) return;
  if (spec.family == Family::GaussianMixture)
    r.posterior = sort_peak_blocks(r.posterior, 3, 1, spec.K);
  else if (spec.family == Family::XpsShirley)
    r.posterior = sort_peak_blocks(r.posterior, 4, 1, spec.K);
  const Index d = r.posterior.rows();
  const ArrayXd w = ArrayXd::Ones(r.posterior.cols());
  VectorXd mean(d), lo95(d), hi95(d), lo99(d), hi99(d);
  for (Index i = 0; i < d; ++i) {
    const ArrayXd row = r.posterior.row(i).transpose().array();
    mean[i] = row.mean();
    const auto c95 = credible_interval(row, w, 0.95);
    const auto c99 = credible_interval(row, w, 0.99);
    lo95[i] = c95.first;
    hi95[i] = c95.second;
    lo99[i] = c99.first;
    hi99[i] = c99.second;
  }
  r.arrays["post_mean"] = mean;
  r.arrays["ci95_lo"] = lo95;
  r.arrays["ci95_hi"] = hi95;
  r.arrays["ci99_lo"] = lo99;
  r.arrays["ci99_hi"] = hi99;
}

int cmd_generate(const std::string& family, std::uint64_t seed, const std::string& out_dir,
                 long long n_points, int k_true, const std::string& data_dir) {
  std::filesystem::create_directories(out_dir);
  SyntheticDataset ds;
  if (family == "gm3")
    ds = gen_gaussian_mixture(3, seed, -1.0, data_dir);
  else if (family == "gm10")
    ds = gen_gaussian_mixture(10, seed, -1.0, data_dir);
  else if (family == "gm30")
    ds = gen_gaussian_mixture(30, seed, -1.0, data_dir);
  else if (family == "xrd")
    ds = gen_xrd(n_points, seed, false, data_dir);
  else if (family == "xps")
    ds = gen_xps(k_true, seed);
  else
    throw std::invalid_argument("unknown family: " + family +
                                " (expected gm3|gm10|gm30|xrd|xps)");

  const std::string base = out_dir + "/" + family;
  save_spectrum(ds.data, base + ".csv");
  std::vector<std::string> names;
  for (const auto& p : ds.spec.layout) names.push_back(p.name);
  save_truth(ds.truth, names, base + ".truth");
  std::cout << "wrote " << base << ".csv and " << base << ".truth\n";
  if (family == "xrd") {
    save_phase_refs(ds.spec.phases, base + ".phases.csv");
    std::cout << "wrote " << base << ".phases.csv\n";
  }
  return kExitOk;
}

int cmd_fit(const std::string& sampler, const std::string& config_path,
            const std::string& data_path, const std::string& out_path, const std::string& label) {
  Config cfg = load_config(config_path);
  validate_config_keys(cfg);
  const Spectrum data = load_spectrum(data_path);
  const ModelSpec spec = make_model_spec(cfg, data);

  RunReport r;
  if (sampler == "smc") {
    r = smc_run(spec, data, make_smc_config(cfg));
  } else if (sampler == "remc") {
    r = remc_run(spec, data, make_remc_config(cfg));
  } else {
    throw std::invalid_argument("unknown sampler: " + sampler + " (expected smc|remc)");
  }
  r.label = label;
  r.config_lines = cfg.lines;
  finish_report(r, spec);
  write_report(r, out_path, max_draws_of(cfg));
  std::cout << "F = " << format_double(r.F) << "  (" << out_path << ")\n";
  if (r.diverged || !std::isfinite(r.F)) {
    std::cerr << "error: non-finite free energy (see " << out_path << ")\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_model_select(const std::string& sampler, const std::string& config_path,
                     const std::string& data_path, const std::string& k_range, int trials,
                     const std::string& out_path) {
  Config cfg = load_config(config_path);
  validate_config_keys(cfg);
  const auto dots = k_range.find("..");
  if (dots == std::string::npos)
    throw std::invalid_argument("--k-range expects the form A..B, got " + k_range);
  int k_lo = 0, k_hi = 0;
  try {
    k_lo = std::stoi(k_range.substr(0, dots));
    k_hi = std::stoi(k_range.substr(dots + 2));
  } catch (const std::exception&) {
    throw std::invalid_argument("--k-range expects integers, got " + k_range);
  }
  if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("--k-range must satisfy 1 <= A <= B");
  if (trials < 1) throw std::invalid_argument("--trials must be >= 1");

  const Spectrum data = load_spectrum(data_path);
  const std::string family = cfg_str(cfg, "family");
  // every candidate must compete under the same prior family
  const bool force_uniform = family == "gm" && !cfg.kv.count("gm.mu_prior");
  const std::uint64_t base_seed = base_seed_of(cfg);

  std::vector<std::pair<int, RunReport>> reports;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = trial_seed(base_seed, t);
    for (int k = k_lo; k <= k_hi; ++k) {
      Config ck = cfg;
      ck.kv["K"] = std::to_string(k);
      const ModelSpec spec = make_model_spec(ck, data, force_uniform);
      RunReport r;
      if (sampler == "smc") {
        SmcConfig sc = make_smc_config(cfg);
        sc.seed = seed;
        r = smc_run(spec, data, sc);
      } else if (sampler == "remc") {
        RemcConfig rc = make_remc_config(cfg);
        rc.seed = seed;
        r = remc_run(spec, data, rc);
      } else {
        throw std::invalid_argument("unknown sampler: " + sampler + " (expected smc|remc)");
      }
      r.label = "K" + std::to_string(k) + "_t" + std::to_string(t);
      r.posterior.resize(0, 0);  // selection only consumes F
      reports.emplace_back(k, std::move(r));
    }
  }

  ModelChoice choice;
  try {
    choice = model_select(reports);
  } catch (const std::runtime_error& e) {
    throw NumericFailure(e.what());
  }

  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot write table file: " + out_path);
  out << "# model selection over K = " << k_lo << ".." << k_hi << ", sampler " << sampler
      << ", trials " << trials << "\n";
  for (const auto& line : cfg.lines) out << "#cfg " << line << "\n";
  out << "K\tF_mean\tF_std\ttrials\tstatus\n";
  for (const auto& row : choice.table)
    out << row.K << "\t" << format_double(row.F) << "\t" << format_double(row.trial_std) << "\t"
        << row.trials << "\t" << (row.excluded ? "excluded" : "ok") << "\n";
  out << "chosen\t" << choice.K_best << "\n";
  if (!out) throw std::invalid_argument("write failure on table file: " + out_path);
  std::cout << "chosen K = " << choice.K_best << "  (" << out_path << ")\n";
  return kExitOk;
}

int cmd_benchmark(const std::string& config_path, const std::string& data_path,
                  const std::string& out_dir, int trials, const std::string& reference,
                  bool parallel_trials, const std::string& ci_param) {
  Config cfg = load_config(config_path);
  validate_config_keys(cfg);
  const Spectrum data = load_spectrum(data_path);
  const ModelSpec spec = make_model_spec(cfg, data);
  const auto grid = make_bench_grid(cfg);
  if (trials < 2) throw std::invalid_argument("--trials must be >= 2");

  BenchResult res;
  try {
    res = benchmark(spec, data, grid, trials, base_seed_of(cfg), reference, parallel_trials);
  } catch (const std::runtime_error& e) {
    throw NumericFailure(e.what());
  }

  std::filesystem::create_directories(out_dir);
  const Index max_draws = max_draws_of(cfg);
  for (size_t i = 0; i < res.runs.size(); ++i) {
    RunReport& r = res.runs[i];
    r.config_lines = cfg.lines;
    const int t = static_cast<int>(i % static_cast<size_t>(trials));
    write_report(r, out_dir + "/" + r.label + "_t" + std::to_string(t) + ".report", max_draws);
  }
  {
    const std::string path = out_dir + "/bench_table.txt";
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write table file: " + path);
    out << bench_table_text(res.table);
  }
  if (!ci_param.empty()) {
    const RunReport* ref_run = nullptr;
    for (const auto& r : res.runs)
      if (r.label == res.table.reference_label) {
        ref_run = &r;
        break;
      }
    if (!ref_run) throw NumericFailure("reference condition produced no runs");
    const auto rows = ci_error_curve(res.runs, *ref_run, ci_param);
    const std::string path = out_dir + "/ci_table.txt";
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write table file: " + path);
    out << ci_table_text(rows);
  }
  std::cout << "reference " << res.table.reference_label << "  F_ref "
            << format_double(res.table.f_ref) << "  (" << out_dir << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral fitting with evidence-estimating samplers"};
  app.require_subcommand(1);

  std::string family, sampler = "smc", config_path, data_path, out_path, out_dir;
  std::string label, k_range, reference, ci_param, data_dir;
  std::uint64_t seed = 0;
  long long n_points = 1000;
  int k_true = 7, trials_ms = 1, trials_bench = 10;
  bool parallel_trials = false;

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset and its truth sidecar");
  gen->add_option("--family", family, "gm3|gm10|gm30|xrd|xps")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--n", n_points, "grid size (xrd)");
  gen->add_option("--k-true", k_true, "peak count (xps surrogate)");
  gen->add_option("--data-dir", data_dir, "override the bundled truth-table directory");

  auto* fit = app.add_subcommand("fit", "run one sampler and write the run report");
  fit->add_option("--sampler", sampler, "smc|remc")->required();
  fit->add_option("--config", config_path, "key=value config file")->required();
  fit->add_option("--data", data_path, "two-column spectrum file")->required();
  fit->add_option("--out", out_path, "report file")->required();
  fit->add_option("--label", label, "condition tag echoed into the report");

  auto* ms = app.add_subcommand("model-select", "fit every K in a range and pick the best");
  ms->add_option("--sampler", sampler, "smc|remc");
  ms->add_option("--config", config_path, "key=value config file")->required();
  ms->add_option("--data", data_path, "two-column spectrum file")->required();
  ms->add_option("--k-range", k_range, "candidate range A..B")->required();
  ms->add_option("--trials", trials_ms, "independent repeats per candidate");
  ms->add_option("--out", out_path, "table file")->required();

  auto* bench = app.add_subcommand("benchmark", "repeated-trial convergence benchmark");
  bench->add_option("--config", config_path, "config with bench.smc_T / bench.remc_sweeps")
      ->required();
  bench->add_option("--data", data_path, "two-column spectrum file")->required();
  bench->add_option("--out-dir", out_dir, "directory for reports and tables")->required();
  bench->add_option("--trials", trials_bench, "independent trials per condition");
  bench->add_option("--reference", reference, "reference condition label (default: largest SMC)");
  bench->add_flag("--parallel-trials", parallel_trials,
                  "run trials concurrently; timings become non-comparable");
  bench->add_option("--ci-param", ci_param, "also emit the interval-error table for this name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(family, seed, out_dir, n_points, k_true, data_dir);
    if (fit->parsed()) return cmd_fit(sampler, config_path, data_path, out_path, label);
    if (ms->parsed())
      return cmd_model_select(sampler, config_path, data_path, k_range, trials_ms, out_path);
    if (bench->parsed())
      return cmd_benchmark(config_path, data_path, out_dir, trials_bench, reference,
                           parallel_trials, ci_param);
    std::cerr << "error: no command\n";
    return kExitConfig;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

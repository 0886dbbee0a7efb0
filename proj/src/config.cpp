#include "specmc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace specmc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const std::set<std::string> kKnownKeys = {
    "family",        "K",
    "phase_ref",     "noise.kind",
    "noise.sigma",   "noise.sigma0",
    "noise.sigma1",  "noise.sigma2",
    "xps_energy_paper_literal",
    "gm.mu_prior",   "smc.T",
    "smc.n",         "smc.ess_target",
    "smc.max_levels", "remc.L",
    "remc.sweeps",   "remc.burn_in",
    "remc.swap_period", "seed",
    "workers",       "report.max_draws",
    "bench.smc_T",   "bench.remc_sweeps",
};

std::vector<double> num_list(const Config& cfg, const std::string& key) {
  const std::string text = cfg_str(cfg, key);
  std::string t = text;
  for (auto& c : t)
    if (c == ',') c = ' ';
  std::istringstream ss(t);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  if (out.empty() || !ss.eof())
    throw std::invalid_argument("config key " + key + ": expected a comma-separated number list");
  return out;
}

int required_k(const Config& cfg) {
  const double k = cfg_num(cfg, "K");
  if (k < 1 || k != static_cast<double>(static_cast<int>(k)))
    throw std::invalid_argument("config key K: expected a positive integer");
  return static_cast<int>(k);
}

std::uint64_t seed_of(const Config& cfg) {
  const long long s = cfg_int(cfg, "seed", 0);
  if (s < 0) throw std::invalid_argument("config key seed: must be >= 0");
  return static_cast<std::uint64_t>(s);
}

int workers_of(const Config& cfg) {
  const long long w = cfg_int(cfg, "workers", 1);
  if (w < 0) throw std::invalid_argument("config key workers: must be >= 0");
  return static_cast<int>(w);
}

}  // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    cfg.lines.push_back(line);
    std::string body = line;
    const auto hash = body.find('#');
    if (hash != std::string::npos) body.erase(hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line with empty key: " + line);
    if (cfg.kv.count(key)) throw std::invalid_argument("duplicate config key: " + key);
    cfg.kv.emplace(key, value);
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config_keys(const Config& cfg) {
  for (const auto& [key, value] : cfg.kv) {
    if (kKnownKeys.count(key)) continue;
    if (key.rfind("prior.", 0) == 0 && key.size() > 6) continue;
    throw std::invalid_argument("unknown config key: " + key);
  }
}

std::string cfg_str(const Config& cfg, const std::string& key) {
  auto it = cfg.kv.find(key);
  if (it == cfg.kv.end()) throw std::invalid_argument("missing config key: " + key);
  return it->second;
}

std::string cfg_str(const Config& cfg, const std::string& key, const std::string& fallback) {
  auto it = cfg.kv.find(key);
  return it == cfg.kv.end() ? fallback : it->second;
}

double cfg_num(const Config& cfg, const std::string& key) {
  const std::string s = cfg_str(cfg, key);
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad number '" + s + "'");
  }
}

double cfg_num(const Config& cfg, const std::string& key, double fallback) {
  return cfg.kv.count(key) ? cfg_num(cfg, key) : fallback;
}

long long cfg_int(const Config& cfg, const std::string& key, long long fallback) {
  if (!cfg.kv.count(key)) return fallback;
  const std::string s = cfg_str(cfg, key);
  try {
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad integer '" + s + "'");
  }
}

ModelSpec make_model_spec(const Config& cfg, const Spectrum& data, bool force_uniform_mu) {
  if (data.xs.size() == 0) throw std::invalid_argument("make_model_spec: empty spectrum");
  const std::string family = cfg_str(cfg, "family");
  ModelSpec spec;

  if (family == "gm") {
    const int K = required_k(cfg);
    const std::string kind = cfg_str(cfg, "noise.kind", "gaussian");
    if (kind != "gaussian")
      throw std::invalid_argument("config key noise.kind: mixture models need 'gaussian'");
    const double sigma = cfg_num(cfg, "noise.sigma");
    GmMuPrior mu_kind;
    const std::string mu_text = cfg_str(cfg, "gm.mu_prior", "auto");
    if (force_uniform_mu)
      mu_kind = GmMuPrior::UniformRange;
    else if (mu_text == "auto")
      mu_kind = K == 3 ? GmMuPrior::Normal15 : GmMuPrior::UniformRange;
    else if (mu_text == "normal15")
      mu_kind = GmMuPrior::Normal15;
    else if (mu_text == "uniform")
      mu_kind = GmMuPrior::UniformRange;
    else
      throw std::invalid_argument("config key gm.mu_prior: expected auto|normal15|uniform");
    spec = gm_model(K, data.xs.minCoeff(), data.xs.maxCoeff(), sigma, mu_kind);
  } else if (family == "xrd") {
    const std::string path = cfg_str(cfg, "phase_ref");
    auto phases = load_phase_refs(path);
    if (cfg.kv.count("K") && required_k(cfg) != static_cast<int>(phases.size()))
      throw std::invalid_argument("config key K: does not match the phase_ref phase count");
    const std::string kind = cfg_str(cfg, "noise.kind", "poisson");
    NoiseSpec noise;
    if (kind == "poisson")
      noise = PoissonNoise{};
    else if (kind == "gaussian_approx")
      noise = GaussianApproxPoissonNoise{};
    else
      throw std::invalid_argument(
          "config key noise.kind: diffraction models need 'poisson' or 'gaussian_approx'");
    spec = xrd_model(std::move(phases), data, noise);
  } else if (family == "xps") {
    const int K = required_k(cfg);
    const std::string kind = cfg_str(cfg, "noise.kind", "xps_hetero");
    if (kind != "xps_hetero")
      throw std::invalid_argument("config key noise.kind: photoemission models need 'xps_hetero'");
    XpsHeteroNoise noise;
    noise.s0 = cfg_num(cfg, "noise.sigma0", 1.0);
    noise.s1 = cfg_num(cfg, "noise.sigma1", 0.01);
    noise.s2 = cfg_num(cfg, "noise.sigma2", 0.0);
    noise.paper_literal = cfg_num(cfg, "xps_energy_paper_literal", 0.0) != 0.0;
    spec = xps_model(K, data, noise);
  } else {
    throw std::invalid_argument("config key family: expected gm|xrd|xps");
  }

  // prior overrides: exact name first, then a digit-stripped stem
  std::set<std::string> used;
  for (auto& param : spec.layout) {
    const std::string exact = "prior." + param.name;
    std::string stem = param.name;
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
    const std::string stem_key = "prior." + stem;
    if (cfg.kv.count(exact)) {
      param.prior = parse_prior(cfg.kv.at(exact));
      used.insert(exact);
    } else if (stem != param.name && cfg.kv.count(stem_key)) {
      param.prior = parse_prior(cfg.kv.at(stem_key));
      used.insert(stem_key);
    }
  }
  for (const auto& [key, value] : cfg.kv)
    if (key.rfind("prior.", 0) == 0 && !used.count(key))
      throw std::invalid_argument("prior override matches no parameter: " + key);

  validate_model(spec);
  return spec;
}

SmcConfig make_smc_config(const Config& cfg) {
  SmcConfig out;
  out.T = cfg_int(cfg, "smc.T", 10000);
  const long long n = cfg_int(cfg, "smc.n", 10);
  if (n < 1 || n > out.T) throw std::invalid_argument("config key smc.n: must be in [1, smc.T]");
  out.n = static_cast<int>(n);
  if (out.T % out.n != 0)
    throw std::invalid_argument("config key smc.T: must be a multiple of smc.n");
  out.ess_target = cfg_num(cfg, "smc.ess_target", 0.5);
  out.max_levels = static_cast<int>(cfg_int(cfg, "smc.max_levels", 2000));
  out.seed = seed_of(cfg);
  out.workers = workers_of(cfg);
  validate_smc_config(out);
  return out;
}

RemcConfig make_remc_config(const Config& cfg) {
  RemcConfig out;
  out.L = static_cast<int>(cfg_int(cfg, "remc.L", 44));
  out.total_sweeps = cfg_int(cfg, "remc.sweeps", 10000);
  out.burn_in_fraction = cfg_num(cfg, "remc.burn_in", 0.5);
  out.swap_period = cfg_int(cfg, "remc.swap_period", 1);
  out.seed = seed_of(cfg);
  out.workers = workers_of(cfg);
  validate_remc_config(out);
  return out;
}

std::vector<BenchCondition> make_bench_grid(const Config& cfg) {
  std::vector<BenchCondition> grid;
  if (cfg.kv.count("bench.smc_T")) {
    // every condition replaces T, so when the config leaves smc.T unset, pin
    // the base to the first grid entry instead of letting the default trip
    // the n-divisibility check for an n the entries themselves satisfy
    Config base_cfg = cfg;
    const auto ts = num_list(cfg, "bench.smc_T");
    if (!cfg.kv.count("smc.T") && !ts.empty())
      base_cfg.kv["smc.T"] = std::to_string(static_cast<long long>(ts.front()));
    const SmcConfig base = make_smc_config(base_cfg);
    for (double tv : num_list(cfg, "bench.smc_T")) {
      const long long T = static_cast<long long>(tv);
      if (tv != static_cast<double>(T) || T < 2)
        throw std::invalid_argument("config key bench.smc_T: entries must be integers >= 2");
      BenchCondition c;
      c.sampler = "smc";
      c.smc = base;
      c.smc.T = T;
      if (c.smc.T % c.smc.n != 0)
        throw std::invalid_argument("config key bench.smc_T: every T must be a multiple of smc.n");
      c.label = "smc_T" + std::to_string(T);
      grid.push_back(std::move(c));
    }
  }
  if (cfg.kv.count("bench.remc_sweeps")) {
    const RemcConfig base = make_remc_config(cfg);
    for (double sv : num_list(cfg, "bench.remc_sweeps")) {
      const long long s = static_cast<long long>(sv);
      if (sv != static_cast<double>(s) || s < 1)
        throw std::invalid_argument(
            "config key bench.remc_sweeps: entries must be integers >= 1");
      BenchCondition c;
      c.sampler = "remc";
      c.remc = base;
      c.remc.total_sweeps = s;
      c.label = "remc_s" + std::to_string(s);
      grid.push_back(std::move(c));
    }
  }
  if (grid.empty())
    throw std::invalid_argument("benchmark config needs bench.smc_T or bench.remc_sweeps");
  return grid;
}

}  // namespace specmc

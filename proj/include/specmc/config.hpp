#ifndef SPECMC_CONFIG_HPP
#define SPECMC_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "specmc/bench.hpp"

namespace specmc {

// Flat key=value document; '#' comments; duplicate or unknown keys rejected.
struct Config {
  std::map<std::string, std::string> kv;
  std::vector<std::string> lines;  // verbatim, echoed into reports
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

// Every error names the offending key (std::invalid_argument).
void validate_config_keys(const Config& cfg);

std::string cfg_str(const Config& cfg, const std::string& key);  // required
std::string cfg_str(const Config& cfg, const std::string& key, const std::string& fallback);
double cfg_num(const Config& cfg, const std::string& key, double fallback);
double cfg_num(const Config& cfg, const std::string& key);  // required
long long cfg_int(const Config& cfg, const std::string& key, long long fallback);

// Model from config + data, data-driven priors included; force_uniform_mu
// overrides the mixture center prior regardless of K (model selection runs
// every candidate under the same prior family).
ModelSpec make_model_spec(const Config& cfg, const Spectrum& data, bool force_uniform_mu = false);

SmcConfig make_smc_config(const Config& cfg);
RemcConfig make_remc_config(const Config& cfg);

// Conditions from the bench.smc_T / bench.remc_sweeps lists; the remaining
// sampler keys supply the shared settings.
std::vector<BenchCondition> make_bench_grid(const Config& cfg);

}  // namespace specmc

#endif

#ifndef SPECMC_REPORT_HPP
#define SPECMC_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include "specmc/math.hpp"

namespace specmc {

// Flat structured run document: scalars, named arrays, a posterior draw
// block, and the verbatim config echo. Numbers are serialized with
// shortest-round-trip formatting, so reading a written report reproduces
// every double bit for bit.
struct RunReport {
  std::string sampler;  // "smc" | "remc"
  std::string label;    // condition tag (benchmarks); may be empty
  double F = kNaN;
  bool diverged = false;
  double wall_seconds = 0.0;
  std::vector<std::string> param_names;
  std::map<std::string, double> scalars;
  std::map<std::string, VectorXd> arrays;
  MatrixXd posterior;  // d x draws
  std::vector<std::string> config_lines;
};

// max_draws < posterior cols downsamples by a deterministic stride.
void write_report(const RunReport& r, const std::string& path, Index max_draws = 20000);
RunReport read_report(const std::string& path);

std::string format_double(double v);        // shortest round-trip
double parse_double(const std::string& s);  // inverse of format_double

}  // namespace specmc

#endif

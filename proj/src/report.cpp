#include "specmc/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specmc {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  double v;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw std::runtime_error("bad number in report: " + s);
  return v;
}

namespace {

void write_vector(std::ofstream& out, const std::string& name, const VectorXd& v) {
  out << "array " << name << " " << v.size();
  for (Index i = 0; i < v.size(); ++i) out << " " << format_double(v[i]);
  out << "\n";
}

}  // namespace

void write_report(const RunReport& r, const std::string& path, Index max_draws) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "specmc-report 1\n";
  out << "sampler " << r.sampler << "\n";
  if (!r.label.empty()) out << "label " << r.label << "\n";
  out << "diverged " << (r.diverged ? 1 : 0) << "\n";
  out << "scalar F " << format_double(r.F) << "\n";
  out << "scalar wall_seconds " << format_double(r.wall_seconds) << "\n";
  for (auto& [k, v] : r.scalars) out << "scalar " << k << " " << format_double(v) << "\n";
  if (!r.param_names.empty()) {
    out << "param_names";
    for (auto& n : r.param_names) out << " " << n;
    out << "\n";
  }
  for (auto& [k, v] : r.arrays) write_vector(out, k, v);
  const Index d = r.posterior.rows();
  const Index m = r.posterior.cols();
  Index keep = m;
  Index stride = 1;
  if (max_draws > 0 && m > max_draws) {
    stride = (m + max_draws - 1) / max_draws;
    keep = (m + stride - 1) / stride;
  }
  if (d > 0 && keep > 0) {
    out << "posterior " << keep << " " << d << "\n";
    for (Index j = 0; j < keep; ++j) {
      const Index col = j * stride;
      for (Index i = 0; i < d; ++i) {
        if (i) out << " ";
        out << format_double(r.posterior(i, col));
      }
      out << "\n";
    }
  }
  out << "config_begin\n";
  for (auto& line : r.config_lines) out << line << "\n";
  out << "config_end\n";
}

RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "specmc-report 1")
    throw std::runtime_error("not a specmc report: " + path);
  RunReport r;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "sampler") {
      ss >> r.sampler;
    } else if (tag == "label") {
      ss >> r.label;
    } else if (tag == "diverged") {
      int v = 0;
      ss >> v;
      r.diverged = v != 0;
    } else if (tag == "scalar") {
      std::string k, v;
      ss >> k >> v;
      double x = parse_double(v);
      if (k == "F")
        r.F = x;
      else if (k == "wall_seconds")
        r.wall_seconds = x;
      else
        r.scalars[k] = x;
    } else if (tag == "param_names") {
      std::string n;
      while (ss >> n) r.param_names.push_back(n);
    } else if (tag == "array") {
      std::string k;
      Index n;
      ss >> k >> n;
      VectorXd v(n);
      std::string tok;
      for (Index i = 0; i < n; ++i) {
        if (!(ss >> tok)) throw std::runtime_error("short array in report: " + k);
        v[i] = parse_double(tok);
      }
      r.arrays[k] = v;
    } else if (tag == "posterior") {
      Index rows, d;
      ss >> rows >> d;
      r.posterior.resize(d, rows);
      std::string tok;
      for (Index j = 0; j < rows; ++j) {
        if (!std::getline(in, line)) throw std::runtime_error("short posterior block");
        std::istringstream rs(line);
        for (Index i = 0; i < d; ++i) {
          if (!(rs >> tok)) throw std::runtime_error("short posterior row");
          r.posterior(i, j) = parse_double(tok);
        }
      }
    } else if (tag == "config_begin") {
      while (std::getline(in, line) && line != "config_end") r.config_lines.push_back(line);
    } else {
      throw std::runtime_error("unknown report tag: " + tag);
    }
  }
  return r;
}

}  // namespace specmc

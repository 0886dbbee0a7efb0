#include "specmc/spectrum.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace specmc {

void validate_spectrum(const Spectrum& s, bool require_nonneg) {
  if (s.xs.size() != s.ys.size()) throw std::invalid_argument("spectrum: xs/ys length mismatch");
  if (s.xs.size() < 2) throw std::invalid_argument("spectrum: needs at least 2 points");
  for (Index i = 0; i < s.xs.size(); ++i) {
    if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i]))
      throw std::invalid_argument("spectrum: non-finite value at row " + std::to_string(i));
    if (i > 0 && !(s.xs[i] > s.xs[i - 1]))
      throw std::invalid_argument("spectrum: xs not strictly increasing at row " + std::to_string(i));
    if (require_nonneg && s.ys[i] < 0.0)
      throw std::invalid_argument("spectrum: negative intensity at row " + std::to_string(i));
  }
}

namespace {

bool parse_two_doubles(const std::string& line, double& a, double& b) {
  std::string t = line;
  for (auto& c : t)
    if (c == ',' || c == '\t' || c == ';') c = ' ';
  std::istringstream ss(t);
  return static_cast<bool>(ss >> a >> b);
}

}  // namespace

Spectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file: " + path);
  std::vector<double> xs, ys;
  std::string line;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    double a, b;
    if (!parse_two_doubles(line, a, b)) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw std::runtime_error("unparseable spectrum line: " + line);
    }
    header_allowed = false;
    xs.push_back(a);
    ys.push_back(b);
  }
  Spectrum s;
  s.xs = Eigen::Map<ArrayXd>(xs.data(), static_cast<Index>(xs.size()));
  s.ys = Eigen::Map<ArrayXd>(ys.data(), static_cast<Index>(ys.size()));
  validate_spectrum(s);
  return s;
}

void save_spectrum(const Spectrum& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write spectrum file: " + path);
  out << "# x y\n";
  char buf[64];
  for (Index i = 0; i < s.xs.size(); ++i) {
    auto r1 = std::to_chars(buf, buf + sizeof buf, s.xs[i]);
    out.write(buf, r1.ptr - buf);
    out.put(' ');
    auto r2 = std::to_chars(buf, buf + sizeof buf, s.ys[i]);
    out.write(buf, r2.ptr - buf);
    out.put('\n');
  }
}

}  // namespace specmc

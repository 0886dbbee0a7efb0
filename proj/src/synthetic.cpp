#include "specmc/synthetic.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "specmc/report.hpp"

#ifndef SPECMC_DATA_DIR
#define SPECMC_DATA_DIR "data"
#endif

namespace specmc {

namespace {

// '#' comments; fields split on commas/whitespace.
std::vector<std::vector<std::string>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string f;
    while (ss >> f) fields.push_back(f);
    if (!fields.empty()) rows.push_back(std::move(fields));
  }
  return rows;
}

double to_num(const std::string& s, const std::string& path) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("bad numeric field '" + s + "' in " + path);
  }
}

ArrayXd linspace(double lo, double hi, Index n) {
  ArrayXd xs(n);
  for (Index i = 0; i < n; ++i)
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

// low-discrepancy fractional parts; keeps the surrogate truths irregular but
// reproducible without touching the RNG stream
double frac_seq(int k, double step) {
  double v = static_cast<double>(k) * step;
  return v - std::floor(v);
}

// the forward curve ignores priors, so truth evaluation can use a spec with
// placeholder ones; the real data-driven spec is built once ys exist
ModelSpec forward_only_spec(Family family, int K, std::vector<PhaseRef> phases, NoiseSpec noise) {
  ModelSpec s;
  s.family = family;
  s.K = K;
  s.phases = std::move(phases);
  s.noise = std::move(noise);
  const int d = model_dim(s);
  for (int i = 0; i < d; ++i)
    s.layout.push_back(ScalarParam{"p" + std::to_string(i), UniformPrior{0.0, 1.0}});
  return s;
}

}  // namespace

std::string data_file(const std::string& name, const std::string& data_dir) {
  const std::string dir = data_dir.empty() ? std::string(SPECMC_DATA_DIR) : data_dir;
  return dir + "/" + name;
}

VectorXd load_gm_truth(const std::string& path) {
  auto rows = read_table(path);
  if (rows.empty()) throw std::runtime_error("empty truth table: " + path);
  VectorXd theta(3 * static_cast<Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 4)
      throw std::runtime_error("expected 4 fields per mixture truth row in " + path);
    if (to_num(rows[r][0], path) != static_cast<double>(r + 1))
      throw std::runtime_error("mixture truth rows out of order in " + path);
    theta[3 * static_cast<Index>(r) + 0] = to_num(rows[r][1], path);
    theta[3 * static_cast<Index>(r) + 1] = to_num(rows[r][2], path);
    theta[3 * static_cast<Index>(r) + 2] = to_num(rows[r][3], path);
  }
  return theta;
}

std::vector<XrdPhaseTruth> load_xrd_phase_truth(const std::string& path) {
  auto rows = read_table(path);
  if (rows.empty()) throw std::runtime_error("empty truth table: " + path);
  std::vector<XrdPhaseTruth> out;
  for (auto& r : rows) {
    if (r.size() != 10)
      throw std::runtime_error("expected 10 fields per phase truth row in " + path);
    XrdPhaseTruth t;
    t.phase = r[0];
    t.A = to_num(r[1], path);
    t.d2t = to_num(r[2], path);
    t.alpha = to_num(r[3], path);
    t.r = to_num(r[4], path);
    t.u = to_num(r[5], path);
    t.v = to_num(r[6], path);
    t.w = to_num(r[7], path);
    t.s = to_num(r[8], path);
    t.t = to_num(r[9], path);
    out.push_back(std::move(t));
  }
  return out;
}

std::array<double, 4> load_xrd_bg_truth(const std::string& path) {
  auto rows = read_table(path);
  if (rows.size() != 1 || rows[0].size() != 4)
    throw std::runtime_error("expected one 4-field background truth row in " + path);
  return {to_num(rows[0][0], path), to_num(rows[0][1], path), to_num(rows[0][2], path),
          to_num(rows[0][3], path)};
}

VectorXd pack_xrd_truth(const std::vector<XrdPhaseTruth>& rows, const std::array<double, 4>& bg) {
  const Index K = static_cast<Index>(rows.size());
  VectorXd theta(9 * K + 4);
  for (Index k = 0; k < K; ++k) {
    const auto& t = rows[static_cast<size_t>(k)];
    double* p = theta.data() + 9 * k;
    p[0] = t.A;
    p[1] = t.d2t;
    p[2] = t.r;
    p[3] = t.alpha;
    p[4] = t.u;
    p[5] = t.v;
    p[6] = t.w;
    p[7] = t.s;
    p[8] = t.t;
  }
  theta[9 * K + 0] = bg[0];
  theta[9 * K + 1] = bg[1];
  theta[9 * K + 2] = bg[2];
  theta[9 * K + 3] = bg[3];
  return theta;
}

std::pair<std::vector<XrdPhaseTruth>, std::array<double, 4>> unpack_xrd_truth(
    const VectorXd& theta, const std::vector<std::string>& phase_names) {
  const Index K = static_cast<Index>(phase_names.size());
  if (theta.size() != 9 * K + 4)
    throw std::invalid_argument("unpack_xrd_truth: layout size mismatch");
  std::vector<XrdPhaseTruth> rows(static_cast<size_t>(K));
  for (Index k = 0; k < K; ++k) {
    auto& t = rows[static_cast<size_t>(k)];
    const double* p = theta.data() + 9 * k;
    t.phase = phase_names[static_cast<size_t>(k)];
    t.A = p[0];
    t.d2t = p[1];
    t.r = p[2];
    t.alpha = p[3];
    t.u = p[4];
    t.v = p[5];
    t.w = p[6];
    t.s = p[7];
    t.t = p[8];
  }
  std::array<double, 4> bg = {theta[9 * K + 0], theta[9 * K + 1], theta[9 * K + 2],
                              theta[9 * K + 3]};
  return {std::move(rows), bg};
}

SyntheticDataset gen_gaussian_mixture(int k, std::uint64_t seed, double sigma_override,
                                      const std::string& data_dir) {
  Index n;
  double x_hi, sigma_table;
  std::string table;
  switch (k) {
    case 3:
      n = 300;
      x_hi = 3.0;
      sigma_table = 0.1;
      table = "gm_truth_k3.csv";
      break;
    case 10:
      n = 1000;
      x_hi = 10.0;
      sigma_table = 0.1;
      table = "gm_truth_k10.csv";
      break;
    case 30:
      n = 3000;
      x_hi = 30.0;
      sigma_table = 0.05;
      table = "gm_truth_k30.csv";
      break;
    default:
      throw std::invalid_argument("gen_gaussian_mixture: k must be 3, 10, or 30");
  }
  const double sigma_gen = sigma_override >= 0.0 ? sigma_override : sigma_table;

  SyntheticDataset ds;
  ds.truth.family = Family::GaussianMixture;
  ds.truth.theta = load_gm_truth(data_file(table, data_dir));
  if (ds.truth.theta.size() != 3 * k)
    throw std::runtime_error("mixture truth table row count does not match k");
  ds.truth.n = n;
  ds.truth.x_lo = 0.0;
  ds.truth.x_hi = x_hi;
  ds.truth.noise = GaussianFixedNoise{sigma_table};

  ds.spec = gm_model(k, 0.0, x_hi, sigma_table,
                     k == 3 ? GmMuPrior::Normal15 : GmMuPrior::UniformRange);

  ds.data.axis = AxisKind::Generic;
  ds.data.xs = linspace(0.0, x_hi, n);
  ds.data.ys = gaussian_mixture_forward(ds.spec, ds.truth.theta, ds.data.xs);
  if (sigma_gen > 0.0) {
    Rng rng(seed);
    for (Index i = 0; i < n; ++i) ds.data.ys[i] += sigma_gen * rng.normal();
  }
  return ds;
}

SyntheticDataset gen_xrd(Index n_points, std::uint64_t seed, bool background_only,
                         const std::string& data_dir) {
  if (n_points < 2) throw std::invalid_argument("gen_xrd: n_points must be >= 2");
  auto phase_truth = load_xrd_phase_truth(data_file("xrd_truth_phases.csv", data_dir));
  auto bg_truth = load_xrd_bg_truth(data_file("xrd_truth_background.csv", data_dir));
  auto phases = load_phase_refs(data_file("tio2_synthetic_reflections.csv", data_dir));
  if (phases.size() != phase_truth.size())
    throw std::runtime_error("gen_xrd: phase truth and reflection list disagree");
  for (size_t i = 0; i < phases.size(); ++i)
    if (phases[i].name != phase_truth[i].phase)
      throw std::runtime_error("gen_xrd: phase name mismatch: " + phases[i].name);
  if (background_only)
    for (auto& t : phase_truth) t.A = 0.0;

  SyntheticDataset ds;
  ds.truth.family = Family::XrdPseudoVoigt;
  ds.truth.theta = pack_xrd_truth(phase_truth, bg_truth);
  ds.truth.n = n_points;
  ds.truth.x_lo = 5.0;
  ds.truth.x_hi = 60.0;
  ds.truth.noise = PoissonNoise{};

  ds.data.axis = AxisKind::TwoTheta;
  ds.data.xs = linspace(5.0, 60.0, n_points);

  const ArrayXd f =
      xrd_forward(forward_only_spec(Family::XrdPseudoVoigt, static_cast<int>(phases.size()),
                                    phases, PoissonNoise{}),
                  ds.truth.theta, ds.data.xs);
  for (Index i = 0; i < n_points; ++i)
    if (!(f[i] > 0.0))
      throw std::runtime_error("gen_xrd: non-positive mean intensity on the grid");

  Rng rng(seed);
  ds.data.ys.resize(n_points);
  for (Index i = 0; i < n_points; ++i) ds.data.ys[i] = static_cast<double>(rng.poisson(f[i]));
  ds.spec = xrd_model(phases, ds.data, PoissonNoise{});
  return ds;
}

SyntheticDataset gen_xps(int k_true, std::uint64_t seed, XpsHeteroNoise noise) {
  if (k_true < 1) throw std::invalid_argument("gen_xps: k_true must be >= 1");
  const Index n = 840;
  const double x_lo = 840.0, x_hi = 900.0;

  SyntheticDataset ds;
  ds.truth.family = Family::XpsShirley;
  ds.truth.n = n;
  ds.truth.x_lo = x_lo;
  ds.truth.x_hi = x_hi;
  ds.truth.noise = noise;

  // Two well-posedness constraints shape the truth. The background priors are
  // anchored to the observed edge intensities with about 5% slack, so 13 eV
  // margins keep the Lorentzian tails at the edges far below that slack. And
  // the amplitude prior floor is 0.3 * ymin, so with a background near 6000
  // no prior-admissible pair of peaks can sum to one true amplitude: a K+1
  // model cannot shadow the truth by splitting a peak.
  VectorXd theta(4 * k_true + 2);
  const double c_lo = x_lo + 13.0, c_hi = x_hi - 13.0;
  for (int k = 1; k <= k_true; ++k) {
    const double fr = k_true == 1 ? 0.5
                                  : static_cast<double>(k - 1) / static_cast<double>(k_true - 1);
    double* p = theta.data() + 4 * (k - 1);
    p[0] = 2400.0 + 800.0 * frac_seq(k, 0.6180339887498949);    // amplitude
    p[1] = c_lo + (c_hi - c_lo) * fr;                           // center
    p[2] = 0.8 + 1.2 * frac_seq(k, 0.3819660112501051);         // width
    p[3] = 0.3 + 0.4 * frac_seq(k, 0.2360679774997897);         // mixing
  }
  theta[4 * k_true + 0] = 6000.0;  // shirley endpoint, low binding energy
  theta[4 * k_true + 1] = 6900.0;
  ds.truth.theta = theta;

  ds.data.axis = AxisKind::BindingEnergy;
  ds.data.xs = linspace(x_lo, x_hi, n);

  const ArrayXd f = xps_forward(forward_only_spec(Family::XpsShirley, k_true, {}, noise), theta,
                                ds.data.xs);

  Rng rng(seed);
  ds.data.ys.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double var = noise.s0 * noise.s0 * f[i] + noise.s1 * noise.s1 * f[i] * f[i] +
                       noise.s2 * noise.s2;
    ds.data.ys[i] = f[i] + std::sqrt(var) * rng.normal();
  }
  ds.spec = xps_model(k_true, ds.data, noise);
  return ds;
}

void save_truth(const TruthTable& truth, const std::vector<std::string>& names,
                const std::string& path) {
  if (static_cast<Index>(names.size()) != truth.theta.size())
    throw std::invalid_argument("save_truth: name count does not match theta");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write truth file: " + path);
  out << "# generator ground truth\n";
  switch (truth.family) {
    case Family::GaussianMixture: out << "family gm\n"; break;
    case Family::XrdPseudoVoigt: out << "family xrd\n"; break;
    case Family::XpsShirley: out << "family xps\n"; break;
  }
  out << "n " << truth.n << "\n";
  out << "x_range " << format_double(truth.x_lo) << " " << format_double(truth.x_hi) << "\n";
  out << "noise " << noise_to_string(truth.noise) << "\n";
  for (size_t i = 0; i < names.size(); ++i)
    out << "param " << names[i] << " " << format_double(truth.theta[static_cast<Index>(i)])
        << "\n";
  if (!out) throw std::runtime_error("write failure on truth file: " + path);
}

}  // namespace specmc

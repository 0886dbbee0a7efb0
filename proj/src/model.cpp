#include "specmc/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "specmc/lineshapes.hpp"

namespace specmc {

void validate_noise(const NoiseSpec& n) {
  if (auto* g = std::get_if<GaussianFixedNoise>(&n)) {
    if (!(g->sigma > 0.0)) throw std::invalid_argument("gaussian noise needs sigma > 0");
  } else if (auto* h = std::get_if<XpsHeteroNoise>(&n)) {
    if (h->s0 < 0.0 || h->s1 < 0.0 || h->s2 < 0.0 || (h->s0 == 0.0 && h->s1 == 0.0 && h->s2 == 0.0))
      throw std::invalid_argument("hetero noise needs sigma0,1,2 >= 0, not all zero");
  }
}

std::string noise_to_string(const NoiseSpec& n) {
  std::ostringstream ss;
  ss.precision(17);
  if (auto* g = std::get_if<GaussianFixedNoise>(&n))
    ss << "gaussian(sigma=" << g->sigma << ")";
  else if (std::holds_alternative<PoissonNoise>(n))
    ss << "poisson";
  else if (std::holds_alternative<GaussianApproxPoissonNoise>(n))
    ss << "gauss_approx";
  else {
    auto& h = std::get<XpsHeteroNoise>(n);
    ss << "xps_hetero(" << h.s0 << "," << h.s1 << "," << h.s2 << ")"
       << (h.paper_literal ? " literal" : "");
  }
  return ss.str();
}

std::vector<PhaseRef> load_phase_refs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open phase reference file: " + path);
  std::vector<PhaseRef> phases;
  std::map<std::string, size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::string t = line;
    for (auto& c : t)
      if (c == ',') c = ' ';
    std::istringstream ss(t);
    std::string name;
    double mu, ri;
    if (!(ss >> name >> mu >> ri)) throw std::runtime_error("bad phase-ref line: " + line);
    auto it = index.find(name);
    if (it == index.end()) {
      index.emplace(name, phases.size());
      phases.push_back(PhaseRef{name, {}});
      it = index.find(name);
    }
    phases[it->second].reflections.push_back(Reflection{mu, ri});
  }
  for (auto& p : phases) {
    double sum = 0.0;
    for (auto& r : p.reflections) {
      if (r.rel_intensity < 0.0)
        throw std::runtime_error("negative reflection intensity in phase " + p.name);
      sum += r.rel_intensity;
    }
    if (!(sum > 0.0)) throw std::runtime_error("phase " + p.name + " has zero total intensity");
  }
  if (phases.empty()) throw std::runtime_error("phase reference file is empty: " + path);
  return phases;
}

void save_phase_refs(const std::vector<PhaseRef>& phases, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write phase reference file: " + path);
  out << "# phase_name, mu_ref_deg, rel_intensity\n";
  out.precision(17);
  for (auto& p : phases)
    for (auto& r : p.reflections) out << p.name << ", " << r.mu_ref << ", " << r.rel_intensity << "\n";
}

int model_dim(const ModelSpec& spec) {
  switch (spec.family) {
    case Family::GaussianMixture: return 3 * spec.K;
    case Family::XrdPseudoVoigt: return 9 * spec.K + 4;
    case Family::XpsShirley: return 4 * spec.K + 2;
  }
  return 0;
}

void validate_model(const ModelSpec& spec) {
  if (spec.K < 1) throw std::invalid_argument("model needs K >= 1");
  if (spec.family == Family::XrdPseudoVoigt) {
    if (static_cast<int>(spec.phases.size()) != spec.K)
      throw std::invalid_argument("xrd model: phases count must equal K");
    for (auto& p : spec.phases)
      if (p.reflections.empty())
        throw std::invalid_argument("xrd phase " + p.name + " has no reflections");
  }
  if (static_cast<int>(spec.layout.size()) != model_dim(spec))
    throw std::invalid_argument("model layout length mismatch");
  for (size_t i = 0; i < spec.layout.size(); ++i) {
    validate_prior(spec.layout[i].prior);
    for (size_t j = i + 1; j < spec.layout.size(); ++j)
      if (spec.layout[i].name == spec.layout[j].name)
        throw std::invalid_argument("duplicate parameter name: " + spec.layout[i].name);
  }
  validate_noise(spec.noise);
}

namespace {

std::string idx_name(const std::string& stem, int k) { return stem + std::to_string(k); }

}  // namespace

ModelSpec gm_model(int K, double x_lo, double x_hi, double noise_sigma, GmMuPrior mu_kind) {
  ModelSpec spec;
  spec.family = Family::GaussianMixture;
  spec.K = K;
  spec.noise = GaussianFixedNoise{noise_sigma};
  PriorSpec mu_prior = mu_kind == GmMuPrior::Normal15
                           ? PriorSpec(NormalPrior{1.5, 0.2})
                           : PriorSpec(UniformPrior{x_lo, x_hi});
  for (int k = 1; k <= K; ++k) {
    spec.layout.push_back({idx_name("A", k), GammaPrior{5.0, 5.0}});
    spec.layout.push_back({idx_name("mu", k), mu_prior});
    spec.layout.push_back({idx_name("b", k), GammaPrior{5.0, 0.04}});
  }
  validate_model(spec);
  return spec;
}

ModelSpec xrd_model(std::vector<PhaseRef> phases, const Spectrum& data, NoiseSpec noise) {
  ModelSpec spec;
  spec.family = Family::XrdPseudoVoigt;
  spec.K = static_cast<int>(phases.size());
  spec.phases = std::move(phases);
  spec.noise = noise;
  const double ymax = data.ys.maxCoeff();
  const double ymin = data.ys.minCoeff();
  if (!(ymax > ymin)) throw std::invalid_argument("xrd model: degenerate intensity range");
  const double ymin_pos = ymin > 0.0 ? ymin : 0.0;
  for (int k = 1; k <= spec.K; ++k) {
    spec.layout.push_back({idx_name("A", k), GammaPrior{4.0, 4.0 / (ymax - ymin)}});
    spec.layout.push_back({idx_name("d2t", k), NormalPrior{0.0, 0.05 * 0.05}});
    spec.layout.push_back({idx_name("r", k), UniformPrior{0.0, 1.0}});
    spec.layout.push_back({idx_name("alpha", k), GammaPrior{5.0, 4.0}});
    spec.layout.push_back({idx_name("u", k), GammaPrior{1.0, 10.0}});
    spec.layout.push_back({idx_name("v", k), GammaPrior{1.0, 10.0}});
    spec.layout.push_back({idx_name("w", k), GammaPrior{2.0, 20.0}});
    spec.layout.push_back({idx_name("s", k), GammaPrior{2.0, 20.0}});
    spec.layout.push_back({idx_name("t", k), GammaPrior{1.0, 10.0}});
  }
  spec.layout.push_back({"bg_a", GammaPrior{2.0, 1.0 / ymax}});
  spec.layout.push_back({"bg_sigma", GammaPrior{2.0, 0.4}});
  spec.layout.push_back({"bg_r", UniformPrior{0.0, 1.0}});
  double half = std::sqrt(ymin_pos);
  if (!(half > 0.0)) half = 1.0;  // keep lo < hi for zero-count data
  spec.layout.push_back({"bg_b", UniformPrior{ymin - half, ymin + half}});
  validate_model(spec);
  return spec;
}

ModelSpec xps_model(int K, const Spectrum& data, XpsHeteroNoise noise) {
  ModelSpec spec;
  spec.family = Family::XpsShirley;
  spec.K = K;
  spec.noise = noise;
  const Index n = data.ys.size();
  const double ymax = data.ys.maxCoeff();
  const double ymin = data.ys.minCoeff();
  const double yfirst = data.ys[0];
  const double ylast = data.ys[n - 1];
  for (int k = 1; k <= K; ++k) {
    spec.layout.push_back({idx_name("A", k), UniformPrior{std::max(0.0, 0.3 * ymin), 1.05 * ymax}});
    spec.layout.push_back({idx_name("mu", k), UniformPrior{data.xs[0], data.xs[n - 1]}});
    spec.layout.push_back({idx_name("sigma", k), UniformPrior{0.1, 15.0}});
    spec.layout.push_back({idx_name("eta", k), UniformPrior{0.0, 1.0}});
  }
  spec.layout.push_back({"bg_a", UniformPrior{0.95 * yfirst, 1.01 * yfirst}});
  spec.layout.push_back({"bg_b", UniformPrior{0.95 * ylast, 1.01 * ylast}});
  validate_model(spec);
  return spec;
}

SignalModel::SignalModel(const ModelSpec& spec, const ArrayXd& xs) : spec_(spec), xs_(xs) {
  validate_model(spec_);
  const int d = model_dim(spec_);
  block_of_comp_.resize(d);
  switch (spec_.family) {
    case Family::GaussianMixture:
      n_blocks_ = spec_.K;
      for (int i = 0; i < d; ++i) block_of_comp_[i] = i / 3;
      break;
    case Family::XrdPseudoVoigt:
      n_blocks_ = spec_.K + 1;  // phases + background
      for (int i = 0; i < 9 * spec_.K; ++i) block_of_comp_[i] = i / 9;
      for (int i = 9 * spec_.K; i < d; ++i) block_of_comp_[i] = spec_.K;
      break;
    case Family::XpsShirley:
      n_blocks_ = spec_.K;  // shirley background derives from the peak sum
      for (int i = 0; i < 4 * spec_.K; ++i) block_of_comp_[i] = i / 4;
      for (int i = 4 * spec_.K; i < d; ++i) block_of_comp_[i] = -1;
      break;
  }
}

bool SignalModel::eval_block(int b, const VectorXd& theta, ArrayXd& out, std::string* err) const {
  out.resize(xs_.size());
  switch (spec_.family) {
    case Family::GaussianMixture: {
      const double A = theta[3 * b], mu = theta[3 * b + 1], bw = theta[3 * b + 2];
      out = A * (-0.5 * bw * (xs_ - mu).square()).exp();
      return true;
    }
    case Family::XrdPseudoVoigt: {
      if (b == spec_.K) {  // background block
        const int off = 9 * spec_.K;
        const double a = theta[off], sbg = theta[off + 1], rbg = theta[off + 2],
                     bg = theta[off + 3];
        if (!(sbg > 0.0)) {
          if (err) *err += "non-positive background width";
          return false;
        }
        ArrayXd t = xs_ / sbg;
        out = a * ((1.0 - rbg) * (-kFourLn2 * t.square()).exp() + rbg / (1.0 + 4.0 * t.square())) +
              bg;
        return true;
      }
      const int off = 9 * b;
      const double A = theta[off], d2t = theta[off + 1], r = theta[off + 2],
                   alpha = theta[off + 3], u = theta[off + 4], v = theta[off + 5],
                   w = theta[off + 6], s = theta[off + 7], t = theta[off + 8];
      out.setZero();
      constexpr double deg2rad = M_PI / 180.0;
      for (const auto& refl : spec_.phases[b].reflections) {
        const double c = refl.mu_ref + d2t;
        const double half = 0.5 * c * deg2rad;  // theta angle in radians
        const double tn = std::tan(half);
        const double disc = u * tn * tn - v * tn + w;
        if (!(disc > 0.0)) {
          if (err)
            *err += "Caglioti discriminant non-positive at reflection center " +
                    std::to_string(c) + " deg";
          return false;
        }
        const double sig0 = std::sqrt(disc);
        const double om0 = s / std::cos(half) + t * tn;
        if (!(om0 > 0.0)) {
          if (err)
            *err += "non-positive Lorentzian width at reflection center " + std::to_string(c) +
                    " deg";
          return false;
        }
        ArrayXd dx = xs_ - c;
        // widths scale by alpha on the high-angle side of the center
        ArrayXd wg = (dx >= 0.0).select(dx / (alpha * sig0), dx / sig0);
        ArrayXd wl = (dx >= 0.0).select(dx / (alpha * om0), dx / om0);
        out += (A * refl.rel_intensity) *
               ((1.0 - r) * (-kFourLn2 * wg.square()).exp() + r / (1.0 + 4.0 * wl.square()));
      }
      return true;
    }
    case Family::XpsShirley: {
      const double A = theta[4 * b], mu = theta[4 * b + 1], sig = theta[4 * b + 2],
                   eta = theta[4 * b + 3];
      if (!(sig > 0.0)) {
        if (err) *err += "non-positive peak width";
        return false;
      }
      ArrayXd dx = xs_ - mu;
      out = A * (eta * (-kLn2 / (sig * sig) * dx.square()).exp() +
                 (1.0 - eta) * (sig * sig) / (sig * sig + dx.square()));
      return true;
    }
  }
  return false;
}

bool SignalModel::combine(const std::vector<const ArrayXd*>& blocks, const VectorXd& theta,
                          ArrayXd& f) const {
  f = *blocks[0];
  for (int b = 1; b < n_blocks_; ++b) f += *blocks[b];
  if (spec_.family == Family::XpsShirley) {
    const int off = 4 * spec_.K;
    f += shirley_background(xs_, f, theta[off], theta[off + 1]);
  }
  return true;
}

namespace {

ArrayXd forward_via_blocks(const SignalModel& sm, const VectorXd& theta) {
  if (theta.size() != model_dim(sm.spec()))
    throw std::invalid_argument("forward: theta length mismatch");
  std::vector<ArrayXd> blocks(sm.n_blocks());
  std::vector<const ArrayXd*> ptrs(sm.n_blocks());
  std::string err;
  for (int b = 0; b < sm.n_blocks(); ++b) {
    if (!sm.eval_block(b, theta, blocks[b], &err)) throw std::runtime_error("forward fault: " + err);
    ptrs[b] = &blocks[b];
  }
  ArrayXd f;
  sm.combine(ptrs, theta, f);
  return f;
}

}  // namespace

ArrayXd gaussian_mixture_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs) {
  if (spec.family != Family::GaussianMixture)
    throw std::invalid_argument("gaussian_mixture_forward: wrong family");
  return forward_via_blocks(SignalModel(spec, xs), theta);
}

ArrayXd xrd_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs) {
  if (spec.family != Family::XrdPseudoVoigt) throw std::invalid_argument("xrd_forward: wrong family");
  return forward_via_blocks(SignalModel(spec, xs), theta);
}

ArrayXd xps_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs) {
  if (spec.family != Family::XpsShirley) throw std::invalid_argument("xps_forward: wrong family");
  return forward_via_blocks(SignalModel(spec, xs), theta);
}

ArrayXd model_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs) {
  return forward_via_blocks(SignalModel(spec, xs), theta);
}

}  // namespace specmc

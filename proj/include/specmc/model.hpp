#ifndef SPECMC_MODEL_HPP
#define SPECMC_MODEL_HPP

#include <string>
#include <variant>
#include <vector>

#include "specmc/priors.hpp"
#include "specmc/spectrum.hpp"

namespace specmc {

struct GaussianFixedNoise {
  double sigma;  // > 0
};
struct PoissonNoise {};
struct GaussianApproxPoissonNoise {};
struct XpsHeteroNoise {
  double s0, s1, s2;          // >= 0, not all zero
  bool paper_literal = false;  // drop the 1/2 on the quadratic term
};
using NoiseSpec =
    std::variant<GaussianFixedNoise, PoissonNoise, GaussianApproxPoissonNoise, XpsHeteroNoise>;

void validate_noise(const NoiseSpec& n);
std::string noise_to_string(const NoiseSpec& n);

struct Reflection {
  double mu_ref;         // degrees 2theta
  double rel_intensity;  // >= 0
};
struct PhaseRef {
  std::string name;
  std::vector<Reflection> reflections;
};

// Per-line "phase_name, mu_ref_deg, rel_intensity"; '#' comments ignored.
std::vector<PhaseRef> load_phase_refs(const std::string& path);
void save_phase_refs(const std::vector<PhaseRef>& phases, const std::string& path);

enum class Family { GaussianMixture, XrdPseudoVoigt, XpsShirley };

// Parameter layouts (canonical component order):
//   GaussianMixture: (A_k, mu_k, b_k) per peak                      d = 3K
//   XrdPseudoVoigt:  (A_k, d2t_k, r_k, alpha_k, u_k, v_k, w_k, s_k, t_k)
//                    per phase, then background (a, sigma_bg, r_bg, b)
//                                                                   d = 9K + 4
//   XpsShirley:      (A_k, mu_k, sigma_k, eta_k) per peak, then (a, b)
//                                                                   d = 4K + 2
struct ModelSpec {
  Family family;
  int K = 0;  // peaks (gm, xps) or phases (xrd)
  std::vector<PhaseRef> phases;
  std::vector<ScalarParam> layout;
  NoiseSpec noise;
};

void validate_model(const ModelSpec& spec);
int model_dim(const ModelSpec& spec);

enum class GmMuPrior { Normal15, UniformRange };

// Default priors follow the published tables; data-driven hyperparameters
// (y extremes, x range) come from the arguments.
ModelSpec gm_model(int K, double x_lo, double x_hi, double noise_sigma,
                   GmMuPrior mu_kind);
ModelSpec xrd_model(std::vector<PhaseRef> phases, const Spectrum& data, NoiseSpec noise);
ModelSpec xps_model(int K, const Spectrum& data, XpsHeteroNoise noise = {1.0, 0.01, 0.0, false});

// Forward evaluations (pure). XRD throws std::runtime_error naming the
// offending reflection center when the Caglioti discriminant is non-positive.
ArrayXd gaussian_mixture_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs);
ArrayXd xrd_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs);
ArrayXd xps_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs);
ArrayXd model_forward(const ModelSpec& spec, const VectorXd& theta, const ArrayXd& xs);

// Signal decomposition for incremental evaluation. The signal is a sum of
// independent blocks (peaks/phases, plus an XRD background block); changing
// one scalar component invalidates at most one block. combine() assembles the
// blocks in a fixed order, so a rebuild with cached blocks is bit-identical
// to a from-scratch evaluation.
class SignalModel {
 public:
  SignalModel(const ModelSpec& spec, const ArrayXd& xs);

  int n_blocks() const { return n_blocks_; }
  // -1: component only enters combine() (XPS shirley endpoints a, b).
  int block_of_component(int comp) const { return block_of_comp_[comp]; }
  Index n_points() const { return xs_.size(); }
  const ArrayXd& xs() const { return xs_; }
  const ModelSpec& spec() const { return spec_; }

  // false on evaluation fault (fault message appended to *err if given).
  bool eval_block(int b, const VectorXd& theta, ArrayXd& out, std::string* err = nullptr) const;
  bool combine(const std::vector<const ArrayXd*>& blocks, const VectorXd& theta,
               ArrayXd& f) const;

 private:
  ModelSpec spec_;
  ArrayXd xs_;
  int n_blocks_;
  std::vector<int> block_of_comp_;
};

}  // namespace specmc

#endif

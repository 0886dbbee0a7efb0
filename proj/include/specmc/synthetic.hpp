#ifndef SPECMC_SYNTHETIC_HPP
#define SPECMC_SYNTHETIC_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "specmc/model.hpp"

namespace specmc {

// Ground truth behind a generated dataset; theta is in ModelSpec layout order.
struct TruthTable {
  Family family;
  VectorXd theta;
  Index n = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  NoiseSpec noise;
};

struct SyntheticDataset {
  Spectrum data;
  ModelSpec spec;
  TruthTable truth;
};

// Path of a bundled table; data_dir = "" resolves to the build-time default.
std::string data_file(const std::string& name, const std::string& data_dir = "");

// Versioned truth-table loaders. The mixture table rows are (k, A, mu, b);
// the returned vector interleaves (A, mu, b) per peak.
VectorXd load_gm_truth(const std::string& path);

// Diffraction phase truths keep the published column order, which differs
// from the sampling layout (alpha and r are transposed there).
struct XrdPhaseTruth {
  std::string phase;
  double A, d2t, alpha, r, u, v, w, s, t;
};
std::vector<XrdPhaseTruth> load_xrd_phase_truth(const std::string& path);
std::array<double, 4> load_xrd_bg_truth(const std::string& path);  // a, sigma_bg, r_bg, b

// Table rows <-> layout vector (A, d2t, r, alpha, u, v, w, s, t per phase,
// then a, sigma_bg, r_bg, b). unpack(pack(x)) is the identity.
VectorXd pack_xrd_truth(const std::vector<XrdPhaseTruth>& rows, const std::array<double, 4>& bg);
std::pair<std::vector<XrdPhaseTruth>, std::array<double, 4>> unpack_xrd_truth(
    const VectorXd& theta, const std::vector<std::string>& phase_names);

// Table-driven gaussian mixture; k in {3, 10, 30}. sigma_override >= 0 forces
// the generating noise (0 = exact curve); the embedded model spec keeps the
// table sigma either way so it remains a valid density.
SyntheticDataset gen_gaussian_mixture(int k, std::uint64_t seed, double sigma_override = -1.0,
                                      const std::string& data_dir = "");

// Three-phase diffraction pattern, Poisson counts, n_points covering
// [5, 60] degrees two-theta. background_only zeroes the phase amplitudes.
SyntheticDataset gen_xrd(Index n_points, std::uint64_t seed, bool background_only = false,
                         const std::string& data_dir = "");

// Deterministic surrogate photoemission dataset: k_true pseudo-Voigt peaks
// plus a shirley background on an 840-point binding-energy grid, with
// heteroscedastic counting noise.
SyntheticDataset gen_xps(int k_true, std::uint64_t seed,
                         XpsHeteroNoise noise = {1.0, 0.01, 0.0, false});

// Sidecar truth document written next to a generated spectrum.
void save_truth(const TruthTable& truth, const std::vector<std::string>& names,
                const std::string& path);

}  // namespace specmc

#endif

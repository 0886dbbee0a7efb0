#ifndef SPECMC_SPECTRUM_HPP
#define SPECMC_SPECTRUM_HPP

#include <string>

#include "specmc/math.hpp"

namespace specmc {

enum class AxisKind { Generic, TwoTheta, BindingEnergy };

// Measured or generated data: paired grids, at least two points, xs strictly
// increasing, ys finite (and >= 0 wherever a Poisson likelihood is used).
struct Spectrum {
  ArrayXd xs;
  ArrayXd ys;
  AxisKind axis = AxisKind::Generic;
};

// Throws std::invalid_argument on any violated invariant.
void validate_spectrum(const Spectrum& s, bool require_nonneg = false);

// Two numeric columns, comma- or whitespace-delimited; '#' comments and one
// optional non-numeric header line are skipped.
Spectrum load_spectrum(const std::string& path);
void save_spectrum(const Spectrum& s, const std::string& path);

}  // namespace specmc

#endif

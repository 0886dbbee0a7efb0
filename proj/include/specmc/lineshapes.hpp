#ifndef SPECMC_LINESHAPES_HPP
#define SPECMC_LINESHAPES_HPP

#include <cmath>
#include <stdexcept>

#include "specmc/math.hpp"

namespace specmc {

inline constexpr double kFourLn2 = 2.772588722239781237668928485832706272302;  // 4 ln 2
inline constexpr double kLn2 = 0.693147180559945309417232121458176568076;

// FWHM-parameterized components; both peak at exactly 1 at the center.
template <typename Scalar>
Scalar gaussian_fwhm(Scalar x, Scalar center, Scalar fwhm) {
  Scalar t = (x - center) / fwhm;
  return std::exp(-kFourLn2 * t * t);
}

template <typename Scalar>
Scalar lorentzian_fwhm(Scalar x, Scalar center, Scalar fwhm) {
  Scalar t = (x - center) / fwhm;
  return Scalar(1) / (Scalar(1) + Scalar(4) * t * t);
}

// (1-r) Gaussian + r Lorentzian, value in (0, 1].
template <typename Scalar>
Scalar pseudo_voigt(Scalar x, Scalar rho, Scalar gamma_g, Scalar gamma_l, Scalar r) {
  if (!(gamma_g > Scalar(0)) || !(gamma_l > Scalar(0)))
    throw std::domain_error("pseudo_voigt: widths must be positive");
  return (Scalar(1) - r) * gaussian_fwhm(x, rho, gamma_g) + r * lorentzian_fwhm(x, rho, gamma_l);
}

inline ArrayXd pseudo_voigt(const ArrayXd& x, double rho, double gamma_g, double gamma_l,
                            double r) {
  if (!(gamma_g > 0.0) || !(gamma_l > 0.0))
    throw std::domain_error("pseudo_voigt: widths must be positive");
  ArrayXd tg = (x - rho) / gamma_g;
  ArrayXd tl = (x - rho) / gamma_l;
  return (1.0 - r) * (-kFourLn2 * tg.square()).exp() + r / (1.0 + 4.0 * tl.square());
}

// Photoemission peak: eta weights the Gaussian; sigma is the HWHM of both
// components (Gaussian std sigma/sqrt(2 ln 2), Lorentzian sigma^2/(sigma^2+d^2)).
template <typename Scalar>
Scalar xps_peak_shape(Scalar x, Scalar mu, Scalar sigma, Scalar eta) {
  Scalar d = x - mu;
  Scalar t = d / sigma;
  Scalar g = std::exp(-kLn2 * t * t);
  Scalar l = sigma * sigma / (sigma * sigma + d * d);
  return eta * g + (Scalar(1) - eta) * l;
}

inline ArrayXd xps_peak_shape(const ArrayXd& x, double mu, double sigma, double eta) {
  ArrayXd d = x - mu;
  ArrayXd g = (-kLn2 / (sigma * sigma) * d.square()).exp();
  ArrayXd l = (sigma * sigma) / (sigma * sigma + d.square());
  return eta * g + (1.0 - eta) * l;
}

// Cumulative-integral background pinned to the endpoints: B(x_1) = a and
// B(x_N) = b exactly, monotone between them. Degenerate signal (normalizer
// below 1e-12 * max * range) falls back to the linear ramp a -> b.
inline ArrayXd shirley_background(const ArrayXd& xs, const ArrayXd& peak_signal, double a,
                                  double b) {
  if (xs.size() != peak_signal.size())
    throw std::invalid_argument("shirley_background: size mismatch");
  const Index n = xs.size();
  ArrayXd out(n);
  const double range = xs[n - 1] - xs[0];
  ArrayXd c = cumtrapz(xs, peak_signal);
  const double total = c[n - 1];
  const double peak_max = peak_signal.maxCoeff();
  if (!(total > 1e-12 * peak_max * range)) {
    out = a + (b - a) * (xs - xs[0]) / range;
  } else {
    out = a + (b - a) * (c / total);
  }
  out[0] = a;
  out[n - 1] = b;
  return out;
}

}  // namespace specmc

#endif

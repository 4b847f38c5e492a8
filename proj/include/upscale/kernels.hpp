#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "upscale/common.hpp"

namespace upscale {

/// Gaussian bump used as a regularized Dirac delta: mean mu, width eps.
/// Unit mass over the real line; peak 1/(sqrt(2 pi) eps) at x = mu.
struct GaussianKernel {
  double mean;
  double width;

  GaussianKernel(double mean_, double width_) : mean(mean_), width(width_) {
    if (!(std::isfinite(mean) && std::isfinite(width)) || width <= 0.0)
      throw std::domain_error("GaussianKernel: width must be finite and > 0");
  }
};

/// Error function erf(x) = 2/sqrt(pi) * integral_0^x exp(-t^2) dt.
///
/// Evaluated from the series erf(x) = 2x e^{-x^2}/sqrt(pi) * sum_n
/// (2x^2)^n / (2n+1)!!, whose terms are all positive (no cancellation);
/// |x| >= 6 saturates to +-1, where the tail is below 2e-17.  Absolute
/// error stays under 1e-12 everywhere, independent of the platform libm.
inline double erf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("erf: non-finite argument");
  if (x == 0.0) return 0.0;
  if (x >= 6.0) return 1.0;
  if (x <= -6.0) return -1.0;
  const double x2 = x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 400; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 3.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return 2.0 * std::numbers::inv_sqrtpi * x * std::exp(-x2) * sum;
}

/// delta_eps(x - mu) = 1/sqrt(2 pi eps^2) exp{-(x - mu)^2 / (2 eps^2)}.
inline double gaussian_delta(double x, const GaussianKernel& k) {
  const double z = (x - k.mean) / k.width;
  return std::exp(-0.5 * z * z) /
         (std::sqrt(2.0 * std::numbers::pi) * k.width);
}

/// d/dx of gaussian_delta: -(x - mu)/eps^2 * delta_eps(x - mu).
inline double gaussian_delta_deriv(double x, const GaussianKernel& k) {
  return -(x - k.mean) / (k.width * k.width) * gaussian_delta(x, k);
}

/// Exact kernel mass over [lo, hi] via erf differences:
/// 1/2 [erf((hi - mu)/(sqrt(2) eps)) - erf((lo - mu)/(sqrt(2) eps))].
inline double gaussian_interval_mass(double lo, double hi,
                                     const GaussianKernel& k) {
  if (lo > hi)
    throw std::domain_error("gaussian_interval_mass: lo > hi");
  const double s = std::numbers::sqrt2 * k.width;
  return 0.5 * (erf((hi - k.mean) / s) - erf((lo - k.mean) / s));
}

}  // namespace upscale

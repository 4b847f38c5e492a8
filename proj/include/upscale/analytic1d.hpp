#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "upscale/cells.hpp"
#include "upscale/common.hpp"
#include "upscale/kernels.hpp"

namespace upscale {

/// Green's function of -u'' with homogeneous Dirichlet conditions on (0, L):
/// G(x, x') = (1 - x'/L) x - max(x - x', 0).
inline double greens_1d(double x, double source, double length) {
  if (!(x >= 0.0 && x <= length))
    throw std::domain_error("greens_1d: x outside [0, L]");
  if (!(source > 0.0 && source < length))
    throw std::domain_error("greens_1d: source outside (0, L)");
  return (1.0 - source / length) * x - std::max(x - source, 0.0);
}

/// Displacement of the continuum model with cells uniform on (a, b):
/// u(x) = P (G(x, a) - G(x, b)).  Piecewise linear with kinks at a and b.
inline double u_density_exact(double x, const Domain1D& dom,
                              const ForceModel& force) {
  return force.magnitude *
         (greens_1d(x, dom.a, dom.length) - greens_1d(x, dom.b, dom.length));
}

/// Contribution of one regularized dipole at s with width eps (unscaled):
/// 1/2 { (x/L - 1) erf(s / (sqrt(2) eps)) + (x/L) erf((L - s)/(sqrt(2) eps))
///       - erf((x - s)/(sqrt(2) eps)) }.
/// Satisfies -u'' = d/dx delta_eps(x - s) with u(0) = u(L) = 0 exactly.
inline double u_dipole_exact(double x, double s, double length, double eps) {
  const double c = std::numbers::sqrt2 * eps;
  return 0.5 * ((x / length - 1.0) * erf(s / c) +
                (x / length) * erf((length - s) / c) - erf((x - s) / c));
}

/// Superposed closed-form displacement of the smoothed-particle model for a
/// uniformly spaced population: width and force scale are both tied to the
/// spacing ds (force magnitude P ds per cell).
inline double u_sph_exact(double x, const CellPopulation& cells,
                          const Domain1D& dom, const ForceModel& force) {
  if (cells.size() < 2)
    throw std::domain_error(
        "u_sph_exact: needs at least 2 cells (spacing undefined)");
  const double ds = cells.uniform_spacing();
  double sum = 0.0;
  for (const auto& p : cells.positions)
    sum += u_dipole_exact(x, p.x, dom.length, ds);
  return force.magnitude * ds * sum;
}

}  // namespace upscale

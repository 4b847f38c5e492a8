#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "upscale/cells.hpp"
#include "upscale/common.hpp"
#include "upscale/kernels.hpp"
#include "upscale/mesh.hpp"
#include "upscale/quadrature.hpp"

namespace upscale {

/// Symmetric tridiagonal system; sub[j] = A[j][j-1], super[j] = A[j][j+1]
/// (sub[0] and super[n-1] unused).
struct TridiagonalSystem {
  std::vector<double> sub, diag, super, rhs;

  int size() const { return static_cast<int>(diag.size()); }
};

/// P1 finite element field on a 1D mesh; boundary values are exactly zero.
struct FeSolution1D {
  const Mesh1D* mesh = nullptr;
  std::vector<double> values;  // one per node

  double eval(double x) const {
    const int e = mesh->locate(x);
    if (e < 0) throw std::domain_error("FeSolution1D::eval: x outside domain");
    const double x0 = mesh->nodes[e], x1 = mesh->nodes[e + 1];
    const double t = (x - x0) / (x1 - x0);
    return (1.0 - t) * values[e] + t * values[e + 1];
  }
};

/// Stiffness of -u'' with P1 elements: interior rows (-1/h, 2/h, -1/h).
/// The rhs starts at zero; Dirichlet rows are not eliminated yet.
inline TridiagonalSystem assemble_stiffness_1d(const Mesh1D& mesh) {
  const int n = mesh.n_nodes();
  TridiagonalSystem sys;
  sys.sub.assign(n, 0.0);
  sys.diag.assign(n, 0.0);
  sys.super.assign(n, 0.0);
  sys.rhs.assign(n, 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double k = 1.0 / (mesh.nodes[e + 1] - mesh.nodes[e]);
    sys.diag[e] += k;
    sys.diag[e + 1] += k;
    sys.super[e] -= k;
    sys.sub[e + 1] -= k;
  }
  return sys;
}

struct SphSource1d {
  const CellPopulation* cells;
  ForceModel force;
};

struct DensitySource1d {
  const DensityField1d* density;
  ForceModel force;
};

using LoadSource1d = std::variant<SphSource1d, DensitySource1d>;

namespace detail {

/// Smoothed-particle load in the integrated-by-parts form
/// f_j = -P h * sum_i integral delta_eps(x - s_i) phi_j'(x) dx,
/// evaluated exactly from kernel interval masses: with the per-cell node
/// CDF c_k = erf((x_k - s_i)/(sqrt(2) eps)) the nodal entry is a second
/// difference, f_j += P h/(2h) (c_{j+1} - 2 c_j + c_{j-1}).
inline std::vector<double> load_1d_sph(const Mesh1D& mesh,
                                       const CellPopulation& cells,
                                       const ForceModel& force) {
  if (cells.dimension != 1)
    throw std::domain_error("load_1d: expected a 1D population");
  const int n = mesh.n_nodes();
  const double eps = force.width_for(mesh.h);
  const double p = force.magnitude;  // P h * (1/h) per element
  std::vector<double> f(n, 0.0);
  std::vector<double> cdf(n);
  for (int i = 0; i < cells.size(); ++i) {
    const double s = cells.positions[static_cast<std::size_t>(i)].x;
    if (!(s > 0.0 && s < mesh.length))
      throw DataError("load_1d: cell " + std::to_string(i) +
                      " outside the domain");
    for (int j = 0; j < n; ++j)
      cdf[j] = 0.5 * erf((mesh.nodes[j] - s) / (std::numbers::sqrt2 * eps));
    f[0] += p * (cdf[1] - cdf[0]);
    for (int j = 1; j + 1 < n; ++j)
      f[j] += p * (cdf[j + 1] - 2.0 * cdf[j] + cdf[j - 1]);
    f[n - 1] += p * (cdf[n - 2] - cdf[n - 1]);
  }
  return f;
}

/// Density load in the same by-parts form, f_j = -P h integral n_c phi_j'.
/// Piecewise-constant fields aligned with the mesh are integrated exactly
/// (f_j = P (N_c(e_j) - N_c(e_{j-1}))); analytic fields use 16-point Gauss
/// quadrature per element.
inline std::vector<double> load_1d_density(const Mesh1D& mesh,
                                           const DensityField1d& density,
                                           const ForceModel& force) {
  const int n = mesh.n_nodes();
  std::vector<double> elem_integral(
      static_cast<std::size_t>(mesh.n_elements()));
  if (const auto* pw = std::get_if<PiecewiseConstant1d>(&density)) {
    if (pw->mesh != &mesh)
      throw DataError(
          "load_1d: piecewise density must be bound to the solve mesh");
    for (int e = 0; e < mesh.n_elements(); ++e)
      elem_integral[e] =
          pw->values[static_cast<std::size_t>(e)] *
          (mesh.nodes[e + 1] - mesh.nodes[e]);
  } else {
    for (int e = 0; e < mesh.n_elements(); ++e)
      elem_integral[e] = integrate_gauss16(
          [&](double x) { return density_value(density, x); }, mesh.nodes[e],
          mesh.nodes[e + 1]);
  }
  std::vector<double> f(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double right = j < mesh.n_elements() ? elem_integral[j] : 0.0;
    const double left = j > 0 ? elem_integral[j - 1] : 0.0;
    f[j] = force.magnitude * (right - left);
  }
  return f;
}

}  // namespace detail

inline std::vector<double> load_1d(const Mesh1D& mesh,
                                   const LoadSource1d& source) {
  if (const auto* sph = std::get_if<SphSource1d>(&source))
    return detail::load_1d_sph(mesh, *sph->cells, sph->force);
  const auto& den = std::get<DensitySource1d>(source);
  return detail::load_1d_density(mesh, *den.density, den.force);
}

/// Row/column elimination of the two boundary nodes (value 0), keeping the
/// system symmetric.
inline void apply_dirichlet_1d(TridiagonalSystem& sys) {
  const int n = sys.size();
  if (n < 2) throw std::domain_error("apply_dirichlet_1d: system too small");
  sys.diag[0] = 1.0;
  sys.super[0] = 0.0;
  sys.rhs[0] = 0.0;
  sys.sub[1] = 0.0;
  sys.diag[n - 1] = 1.0;
  sys.sub[n - 1] = 0.0;
  sys.rhs[n - 1] = 0.0;
  sys.super[n - 2] = 0.0;
}

/// Thomas algorithm; exact for tridiagonal systems up to round-off.
inline FeSolution1D solve_dirichlet_1d(const TridiagonalSystem& sys,
                                       const Mesh1D& mesh) {
  const int n = sys.size();
  if (n != mesh.n_nodes())
    throw DataError("solve_dirichlet_1d: system/mesh size mismatch");
  std::vector<double> c(n, 0.0), d(n, 0.0);
  double pivot = sys.diag[0];
  if (pivot == 0.0) throw NumericalError("solve_dirichlet_1d: zero pivot");
  c[0] = sys.super[0] / pivot;
  d[0] = sys.rhs[0] / pivot;
  for (int j = 1; j < n; ++j) {
    pivot = sys.diag[j] - sys.sub[j] * c[j - 1];
    if (pivot == 0.0) throw NumericalError("solve_dirichlet_1d: zero pivot");
    c[j] = (j + 1 < n ? sys.super[j] : 0.0) / pivot;
    d[j] = (sys.rhs[j] - sys.sub[j] * d[j - 1]) / pivot;
  }
  FeSolution1D u;
  u.mesh = &mesh;
  u.values.assign(n, 0.0);
  u.values[n - 1] = d[n - 1];
  for (int j = n - 2; j >= 0; --j)
    u.values[j] = d[j] - c[j] * u.values[j + 1];
  return u;
}

struct ApproachTiming {
  double assembly_seconds = 0.0;  // stiffness + load
  double solve_seconds = 0.0;
  double total() const { return assembly_seconds + solve_seconds; }
};

struct CaseResult1D {
  FeSolution1D sph;
  FeSolution1D density;
  ApproachTiming sph_time;
  ApproachTiming density_time;
};

namespace detail {

inline FeSolution1D solve_case_1d(const Mesh1D& mesh,
                                  const LoadSource1d& source,
                                  ApproachTiming& timing) {
  WallTimer assembly;
  TridiagonalSystem sys = assemble_stiffness_1d(mesh);
  sys.rhs = load_1d(mesh, source);
  apply_dirichlet_1d(sys);
  timing.assembly_seconds = assembly.seconds();
  WallTimer solve;
  FeSolution1D u = solve_dirichlet_1d(sys, mesh);
  timing.solve_seconds = solve.seconds();
  return u;
}

}  // namespace detail

/// Solves both formulations on the same mesh: the smoothed-particle load
/// from the cell positions and the continuum load from the density field.
/// Assembly and solve are timed separately per approach.
inline CaseResult1D run_case_1d(const Mesh1D& mesh,
                                const CellPopulation& cells,
                                const DensityField1d& density,
                                const ForceModel& force) {
  CaseResult1D result;
  result.sph =
      detail::solve_case_1d(mesh, SphSource1d{&cells, force}, result.sph_time);
  result.density = detail::solve_case_1d(
      mesh, DensitySource1d{&density, force}, result.density_time);
  return result;
}

}  // namespace upscale

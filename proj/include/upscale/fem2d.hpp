#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "upscale/cells.hpp"
#include "upscale/common.hpp"
#include "upscale/fem1d.hpp"  // ApproachTiming
#include "upscale/mesh.hpp"
#include "upscale/quadrature.hpp"
#include "upscale/sparse.hpp"

namespace upscale {

/// Linear isotropic material, plane strain.  nu = 0.5 is excluded
/// (1 - 2 nu appears in a denominator); nu = 0 is allowed.
struct MaterialParams {
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.3;

  MaterialParams() = default;
  MaterialParams(double e, double nu) : youngs_modulus(e), poisson_ratio(nu) {
    if (!(std::isfinite(e) && e > 0.0))
      throw std::domain_error("MaterialParams: Young's modulus must be > 0");
    if (!(nu >= 0.0 && nu < 0.5))
      throw std::domain_error(
          "MaterialParams: Poisson ratio must lie in (0, 0.5); "
          "0.5 is excluded (plane strain), 0 is accepted");
  }
};

using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat6 = std::array<std::array<double, 6>, 6>;

/// Plane-strain constitutive matrix in Voigt form, acting on
/// (eps_xx, eps_yy, gamma_xy): with 2 mu = E/(1 + nu) and
/// lambda = E nu / ((1 + nu)(1 - 2 nu)),
/// D = [[2mu+lambda, lambda, 0], [lambda, 2mu+lambda, 0], [0, 0, mu]].
inline Mat3 elasticity_matrix(const MaterialParams& mat) {
  const double e = mat.youngs_modulus;
  const double nu = mat.poisson_ratio;
  if (!(nu >= 0.0 && nu < 0.5))
    throw std::domain_error("elasticity_matrix: Poisson ratio out of range");
  const double two_mu = e / (1.0 + nu);
  const double lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  Mat3 d{};
  d[0][0] = two_mu + lambda;
  d[0][1] = lambda;
  d[1][0] = lambda;
  d[1][1] = two_mu + lambda;
  d[2][2] = 0.5 * two_mu;
  return d;
}

/// Constant-strain triangle stiffness K_e = A B^T D B; dof order is
/// (ux0, uy0, ux1, uy1, ux2, uy2).  The kernel holds the rigid-body modes.
inline Mat6 element_stiffness(const ElementGeometry& geom, const Mat3& d) {
  if (!(geom.area > 0.0))
    throw DataError("element_stiffness: degenerate triangle");
  double b[3][6] = {};
  for (int i = 0; i < 3; ++i) {
    b[0][2 * i] = geom.grad[i].x;
    b[1][2 * i + 1] = geom.grad[i].y;
    b[2][2 * i] = geom.grad[i].y;
    b[2][2 * i + 1] = geom.grad[i].x;
  }
  double db[3][6] = {};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c)
      for (int k = 0; k < 3; ++k) db[r][c] += d[r][k] * b[k][c];
  Mat6 ke{};
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) sum += b[k][r] * db[k][c];
      ke[r][c] = geom.area * sum;
    }
  return ke;
}

/// P1 vector field on a triangle mesh; values stores (ux, uy) per node.
struct FeSolution2D {
  const TriMesh2D* mesh = nullptr;
  std::vector<double> values;  // 2 per node

  Point eval(Point p) const {
    const int e = mesh->locate(p);
    if (e < 0)
      throw std::domain_error("FeSolution2D::eval: point outside domain");
    const auto& t = mesh->triangles[static_cast<std::size_t>(e)];
    const Point p0 = mesh->nodes[t[0]], p1 = mesh->nodes[t[1]],
                p2 = mesh->nodes[t[2]];
    const double twice_area = cross(p1 - p0, p2 - p0);
    const double l0 = cross(p1 - p, p2 - p) / twice_area;
    const double l1 = cross(p2 - p, p0 - p) / twice_area;
    const double l2 = 1.0 - l0 - l1;
    Point u{0.0, 0.0};
    const double l[3] = {l0, l1, l2};
    for (int i = 0; i < 3; ++i) {
      u.x += l[i] * values[static_cast<std::size_t>(2 * t[i])];
      u.y += l[i] * values[static_cast<std::size_t>(2 * t[i] + 1)];
    }
    return u;
  }
};

/// Global plane-strain stiffness (2 dofs per node), assembled element by
/// element in index order so the rounding is deterministic.
inline CsrMatrix assemble_stiffness_2d(const TriMesh2D& mesh,
                                       const MaterialParams& mat) {
  const int nn = mesh.n_nodes();
  std::vector<std::vector<int>> node_adj(nn);
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) node_adj[t[i]].push_back(t[j]);
  std::vector<std::vector<int>> dof_adj(2 * nn);
  for (int v = 0; v < nn; ++v) {
    auto& row = node_adj[v];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (int a = 0; a < 2; ++a) {
      auto& dofs = dof_adj[2 * v + a];
      dofs.reserve(2 * row.size());
      for (int w : row) {
        dofs.push_back(2 * w);
        dofs.push_back(2 * w + 1);
      }
      std::sort(dofs.begin(), dofs.end());
    }
  }
  CsrMatrix a = CsrMatrix::from_pattern(dof_adj);
  const Mat3 d = elasticity_matrix(mat);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    const Mat6 ke = element_stiffness(element_geometry(mesh, e), d);
    for (int i = 0; i < 3; ++i)
      for (int ai = 0; ai < 2; ++ai)
        for (int j = 0; j < 3; ++j)
          for (int aj = 0; aj < 2; ++aj)
            a.add(2 * t[i] + ai, 2 * t[j] + aj, ke[2 * i + ai][2 * j + aj]);
  }
  return a;
}

struct SphSource2d {
  const CellPopulation* cells;
  ForceModel force;
};

struct DensitySource2d {
  const DensityField2d* density;
  ForceModel force;
};

using LoadSource2d = std::variant<SphSource2d, DensitySource2d>;

namespace detail {

inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::max(0.0, std::min(1.0, t));
  return norm(p - (a + t * ab));
}

inline double point_triangle_distance(Point p, Point a, Point b, Point c) {
  const double twice_area = cross(b - a, c - a);
  const double l0 = cross(b - p, c - p) / twice_area;
  const double l1 = cross(c - p, a - p) / twice_area;
  const double l2 = 1.0 - l0 - l1;
  if (l0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0) return 0.0;
  return std::min({point_segment_distance(p, a, b),
                   point_segment_distance(p, b, c),
                   point_segment_distance(p, c, a)});
}

/// Kernel mass of all cells over one triangle.  Cells farther than 6 eps
/// are skipped (tail mass below 2e-9); the rest use adaptive subdivision
/// resolved to the kernel scale.
inline double sph_element_mass(Point p0, Point p1, Point p2,
                               const CellPopulation& cells, double eps) {
  AdaptiveTriOptions opt;
  opt.edge_limit = eps;
  const double cutoff = 6.0 * eps;
  const double inv2eps2 = 1.0 / (2.0 * eps * eps);
  const double peak = 1.0 / (2.0 * std::numbers::pi * eps * eps);
  double mass = 0.0;
  for (const auto& s : cells.positions) {
    if (point_triangle_distance(s, p0, p1, p2) > cutoff) continue;
    mass += integrate_triangle_adaptive(
        [&](Point x) {
          const Point r = x - s;
          return peak * std::exp(-dot(r, r) * inv2eps2);
        },
        p0, p1, p2, opt);
  }
  return mass;
}

template <class PerElement>
void for_each_element_deterministic(int n_elements, int threads,
                                    PerElement&& body) {
  threads = std::max(1, threads);
  if (threads == 1 || n_elements < 2 * threads) {
    for (int e = 0; e < n_elements; ++e) body(e);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const int chunk = (n_elements + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n_elements, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int e = lo; e < hi; ++e) body(e);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Load in the divergence form f(phi) = -P integral rho (div phi) dOmega,
/// where rho is either the summed Gaussian kernels of the cells or the cell
/// density.  div phi is constant per element and vector basis function, so
/// each element contributes -P grad_i * (mass over the element).
///
/// Per-element masses may be computed on several threads; contributions are
/// scattered serially in element order, so results are identical for any
/// thread count.
inline std::vector<double> load_2d(const TriMesh2D& mesh,
                                   const LoadSource2d& source,
                                   int threads = 1) {
  const int n_el = mesh.n_elements();
  std::vector<double> element_mass(static_cast<std::size_t>(n_el), 0.0);
  double p_scale = 0.0;

  if (const auto* sph = std::get_if<SphSource2d>(&source)) {
    const CellPopulation& cells = *sph->cells;
    if (cells.dimension != 2)
      throw std::domain_error("load_2d: expected a 2D population");
    for (int i = 0; i < cells.size(); ++i)
      if (!mesh.rect.strictly_contains(
              cells.positions[static_cast<std::size_t>(i)]))
        throw DataError("load_2d: cell " + std::to_string(i) +
                        " outside the domain");
    const double eps = sph->force.width_for(mesh.h);
    p_scale = sph->force.magnitude;
    detail::for_each_element_deterministic(n_el, threads, [&](int e) {
      const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
      element_mass[static_cast<std::size_t>(e)] = detail::sph_element_mass(
          mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], cells, eps);
    });
  } else {
    const auto& den = std::get<DensitySource2d>(source);
    p_scale = den.force.magnitude;
    if (const auto* pw = std::get_if<PiecewiseConstant2d>(den.density)) {
      if (pw->mesh != &mesh)
        throw DataError(
            "load_2d: piecewise density must be bound to the solve mesh");
      for (int e = 0; e < n_el; ++e)
        element_mass[static_cast<std::size_t>(e)] =
            pw->values[static_cast<std::size_t>(e)] *
            element_geometry(mesh, e).area;
    } else {
      const DensityField2d& field = *den.density;
      AdaptiveTriOptions opt;
      double scale = 1.0;
      if (const auto* g = std::get_if<Gaussian2d>(&field))
        scale = std::max(1.0, std::abs(g->amplitude));
      opt.abs_tol = 1e-12 * scale;
      detail::for_each_element_deterministic(n_el, threads, [&](int e) {
        const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
        element_mass[static_cast<std::size_t>(e)] =
            integrate_triangle_adaptive(
                [&](Point x) { return density_value(field, x); },
                mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], opt);
      });
    }
  }

  std::vector<double> f(static_cast<std::size_t>(2 * mesh.n_nodes()), 0.0);
  for (int e = 0; e < n_el; ++e) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    const ElementGeometry geom = element_geometry(mesh, e);
    const double m = element_mass[static_cast<std::size_t>(e)];
    for (int i = 0; i < 3; ++i) {
      f[static_cast<std::size_t>(2 * t[i])] -= p_scale * geom.grad[i].x * m;
      f[static_cast<std::size_t>(2 * t[i] + 1)] -=
          p_scale * geom.grad[i].y * m;
    }
  }
  return f;
}

/// Zeroes the rows and columns of every boundary dof (value 0) and puts 1 on
/// the diagonal; the system stays symmetric positive definite.
inline void apply_dirichlet_2d(CsrMatrix& a, std::vector<double>& rhs,
                               const TriMesh2D& mesh) {
  std::vector<char> fixed(static_cast<std::size_t>(a.n), 0);
  for (int v : mesh.boundary_nodes) {
    fixed[static_cast<std::size_t>(2 * v)] = 1;
    fixed[static_cast<std::size_t>(2 * v + 1)] = 1;
  }
  for (int r = 0; r < a.n; ++r)
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const int c = a.cols[static_cast<std::size_t>(k)];
      if (!fixed[static_cast<std::size_t>(r)] &&
          !fixed[static_cast<std::size_t>(c)])
        continue;
      a.vals[static_cast<std::size_t>(k)] = (r == c) ? 1.0 : 0.0;
    }
  for (int d = 0; d < a.n; ++d)
    if (fixed[static_cast<std::size_t>(d)]) rhs[static_cast<std::size_t>(d)] = 0.0;
}

/// Jacobi-preconditioned CG on the eliminated system.
inline FeSolution2D solve_dirichlet_2d(const SparseSystem& sys,
                                       const TriMesh2D& mesh,
                                       const CgOptions& opt = {}) {
  if (sys.matrix.n != 2 * mesh.n_nodes())
    throw DataError("solve_dirichlet_2d: system/mesh size mismatch");
  CgResult cg = solve_cg_jacobi(sys.matrix, sys.rhs, opt);
  FeSolution2D u;
  u.mesh = &mesh;
  u.values = std::move(cg.x);
  return u;
}

struct CaseResult2D {
  FeSolution2D sph;
  FeSolution2D density;
  ApproachTiming sph_time;
  ApproachTiming density_time;
};

namespace detail {

inline FeSolution2D solve_case_2d(const TriMesh2D& mesh,
                                  const MaterialParams& mat,
                                  const LoadSource2d& source, int threads,
                                  ApproachTiming& timing) {
  WallTimer assembly;
  SparseSystem sys;
  sys.matrix = assemble_stiffness_2d(mesh, mat);
  sys.rhs = load_2d(mesh, source, threads);
  apply_dirichlet_2d(sys.matrix, sys.rhs, mesh);
  timing.assembly_seconds = assembly.seconds();
  WallTimer solve;
  FeSolution2D u = solve_dirichlet_2d(sys, mesh);
  timing.solve_seconds = solve.seconds();
  return u;
}

}  // namespace detail

/// Solves both formulations on the same mesh and material; per-approach
/// assembly (stiffness + load) and solve are timed separately.
inline CaseResult2D run_case_2d(const TriMesh2D& mesh,
                                const MaterialParams& mat,
                                const ForceModel& force,
                                const CellPopulation& cells,
                                const DensityField2d& density,
                                int threads = 1) {
  CaseResult2D result;
  result.sph = detail::solve_case_2d(mesh, mat, SphSource2d{&cells, force},
                                     threads, result.sph_time);
  result.density = detail::solve_case_2d(
      mesh, mat, DensitySource2d{&density, force}, threads,
      result.density_time);
  return result;
}

}  // namespace upscale

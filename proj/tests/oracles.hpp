// Test-only reference implementations, independent of the library paths
// they check: dense linear algebra, quadrature-assembled matrices, Monte
// Carlo triangle integration and a manufactured elasticity solution.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "upscale/fem2d.hpp"
#include "upscale/mesh.hpp"
#include "upscale/quadrature.hpp"

namespace oracles {

using upscale::Point;

/// Gaussian elimination with partial pivoting on a dense system.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0)
      throw std::runtime_error("dense_solve: singular matrix");
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double sum = b[r];
    for (int c = r + 1; c < n; ++c) sum -= a[r][c] * x[c];
    x[r] = sum / a[r][r];
  }
  return x;
}

/// 1D P1 stiffness assembled by 10-point Gauss quadrature of phi_i' phi_j'
/// (instead of the closed form).
inline std::vector<std::vector<double>> stiffness_by_quadrature(
    const upscale::Mesh1D& mesh) {
  const int n = mesh.n_nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  const auto& rule = upscale::gauss_legendre<10>();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double lo = mesh.nodes[e], hi = mesh.nodes[e + 1];
    const double dphi[2] = {-1.0 / (hi - lo), 1.0 / (hi - lo)};
    for (const auto& q : rule) {
      const double w = q.w * 0.5 * (hi - lo);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          a[e + i][e + j] += w * dphi[i] * dphi[j];
    }
  }
  return a;
}

/// Monte Carlo integral over one triangle (uniform barycentric sampling).
template <class F>
double mc_triangle_integral(F&& f, Point p0, Point p1, Point p2, int samples,
                            std::uint64_t seed) {
  upscale::SplitMix64 rng(seed);
  const double area = std::abs(upscale::triangle_area(p0, p1, p2));
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double r1 = std::sqrt(rng.next_unit());
    const double r2 = rng.next_unit();
    const Point x = (1.0 - r1) * p0 + (r1 * (1.0 - r2)) * p1 + (r1 * r2) * p2;
    sum += f(x);
  }
  return area * sum / samples;
}

/// Manufactured plane-strain solution u = (sin(pi x) sin(pi y), 0) on the
/// unit square with the matching body force.
struct ManufacturedCase {
  upscale::MaterialParams mat;
  double mu, lambda;

  explicit ManufacturedCase(const upscale::MaterialParams& m) : mat(m) {
    mu = m.youngs_modulus / (2.0 * (1.0 + m.poisson_ratio));
    lambda = m.youngs_modulus * m.poisson_ratio /
             ((1.0 + m.poisson_ratio) * (1.0 - 2.0 * m.poisson_ratio));
  }

  Point displacement(Point p) const {
    return {std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y),
            0.0};
  }

  Point body_force(Point p) const {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double ss =
        std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y);
    const double cc =
        std::cos(std::numbers::pi * p.x) * std::cos(std::numbers::pi * p.y);
    return {pi2 * (3.0 * mu + lambda) * ss, -pi2 * (mu + lambda) * cc};
  }
};

/// Classic vector load f(phi) = int f . phi, 7-point rule per element.
template <class Body>
std::vector<double> load_from_body(const upscale::TriMesh2D& mesh,
                                   Body&& body) {
  std::vector<double> f(static_cast<std::size_t>(2 * mesh.n_nodes()), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    const Point p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]],
                p2 = mesh.nodes[t[2]];
    const double area = upscale::element_geometry(mesh, e).area;
    for (const auto& q : upscale::triangle_rule7()) {
      const Point x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
      const Point fx = body(x);
      const double l[3] = {q.l0, q.l1, q.l2};
      for (int i = 0; i < 3; ++i) {
        f[static_cast<std::size_t>(2 * t[i])] += area * q.w * l[i] * fx.x;
        f[static_cast<std::size_t>(2 * t[i] + 1)] += area * q.w * l[i] * fx.y;
      }
    }
  }
  return f;
}

/// L2 distance between a P1 field and an exact field, 7-point quadrature.
template <class Exact>
double l2_error_against(const upscale::FeSolution2D& u, Exact&& exact) {
  double sum = 0.0;
  const upscale::TriMesh2D& mesh = *u.mesh;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    const Point p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]],
                p2 = mesh.nodes[t[2]];
    const double area = upscale::element_geometry(mesh, e).area;
    for (const auto& q : upscale::triangle_rule7()) {
      const Point x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
      const double l[3] = {q.l0, q.l1, q.l2};
      Point uh{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        uh.x += l[i] * u.values[static_cast<std::size_t>(2 * t[i])];
        uh.y += l[i] * u.values[static_cast<std::size_t>(2 * t[i] + 1)];
      }
      const Point d = uh - exact(x);
      sum += area * q.w * dot(d, d);
    }
  }
  return std::sqrt(sum);
}

}  // namespace oracles

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "upscale/common.hpp"

namespace upscale {

/// Uniform partition of (0, length) into n_elements() intervals.
struct Mesh1D {
  std::vector<double> nodes;  // strictly increasing, nodes[0]=0, back()=length
  double h = 0.0;
  double length = 0.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return n_nodes() - 1; }

  /// Element that owns x, boundaries assigned to the lower element index.
  /// Returns -1 outside [0, length].
  int locate(double x) const {
    if (x < 0.0 || x > length) return -1;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    int j = static_cast<int>(it - nodes.begin()) - 1;
    if (j == n_elements()) --j;  // x == length
    if (j > 0 && nodes[j] == x) --j;
    return j;
  }
};

inline Mesh1D build_mesh_1d(double length, double h_target) {
  if (!(std::isfinite(length) && std::isfinite(h_target)) || length <= 0.0 ||
      h_target <= 0.0 || h_target >= length)
    throw std::domain_error("build_mesh_1d: need 0 < h_target < length");
  const int ne = static_cast<int>(std::ceil(length / h_target - 1e-12));
  Mesh1D m;
  m.length = length;
  m.h = length / ne;
  m.nodes.resize(ne + 1);
  for (int j = 0; j <= ne; ++j) m.nodes[j] = length * j / ne;
  m.nodes.front() = 0.0;
  m.nodes.back() = length;
  return m;
}

/// Midpoint insertion; the coarse node set is preserved exactly.
inline Mesh1D refine(const Mesh1D& mesh) {
  Mesh1D fine;
  fine.length = mesh.length;
  fine.h = mesh.h / 2.0;
  fine.nodes.reserve(2 * mesh.nodes.size() - 1);
  for (int j = 0; j + 1 < mesh.n_nodes(); ++j) {
    fine.nodes.push_back(mesh.nodes[j]);
    fine.nodes.push_back(0.5 * (mesh.nodes[j] + mesh.nodes[j + 1]));
  }
  fine.nodes.push_back(mesh.nodes.back());
  return fine;
}

/// Structured triangulation of a rectangle: nx-by-ny grid of quads, each
/// split by the diagonal from the lower-left to the upper-right corner.
/// Element order is quad row-major (x fastest), lower triangle first.
struct TriMesh2D {
  Rect rect;
  int nx = 0, ny = 0;     // quad counts per side
  double dx = 0.0, dy = 0.0;
  double h = 0.0;         // characteristic size: max edge length (diagonal)
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> boundary_nodes;            // sorted perimeter node indices

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(triangles.size()); }
  int node_index(int i, int j) const { return j * (nx + 1) + i; }

  /// Lowest-index element containing p; -1 outside the rectangle.
  /// Small negative round-off (1e-12 of a cell) is snapped onto the boundary.
  int locate(Point p) const {
    double fx = (p.x - rect.xmin) / dx;
    double fy = (p.y - rect.ymin) / dy;
    const double snap = 1e-12;
    if (fx < 0.0 && fx > -snap) fx = 0.0;
    if (fy < 0.0 && fy > -snap) fy = 0.0;
    if (fx > nx && fx < nx + snap) fx = nx;
    if (fy > ny && fy < ny + snap) fy = ny;
    if (fx < 0.0 || fx > nx || fy < 0.0 || fy > ny) return -1;
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    if (i > 0 && static_cast<double>(i) == fx) --i;  // ties to the lower quad
    if (j > 0 && static_cast<double>(j) == fy) --j;
    if (i == nx) --i;
    if (j == ny) --j;
    const double xi = fx - i;
    const double eta = fy - j;
    const int quad = j * nx + i;
    return 2 * quad + (eta <= xi ? 0 : 1);
  }
};

/// Structured builder with explicit subdivision counts.
inline TriMesh2D build_tri_mesh_2d_grid(Rect rect, int nx, int ny) {
  const double w = rect.width(), ht = rect.height();
  if (!(w > 0.0 && ht > 0.0))
    throw std::domain_error("build_tri_mesh_2d: empty rectangle");
  if (nx < 1 || ny < 1)
    throw std::domain_error("build_tri_mesh_2d: need at least one quad");
  TriMesh2D m;
  m.rect = rect;
  m.nx = nx;
  m.ny = ny;
  m.dx = w / m.nx;
  m.dy = ht / m.ny;
  m.h = std::sqrt(m.dx * m.dx + m.dy * m.dy);

  m.nodes.resize((m.nx + 1) * (m.ny + 1));
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i)
      m.nodes[m.node_index(i, j)] = {
          i == m.nx ? rect.xmax : rect.xmin + i * m.dx,
          j == m.ny ? rect.ymax : rect.ymin + j * m.dy};

  m.triangles.reserve(2 * m.nx * m.ny);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      const int ll = m.node_index(i, j);
      const int lr = ll + 1;
      const int ul = m.node_index(i, j + 1);
      const int ur = ul + 1;
      m.triangles.push_back({ll, lr, ur});
      m.triangles.push_back({ll, ur, ul});
    }

  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i)
      if (i == 0 || i == m.nx || j == 0 || j == m.ny)
        m.boundary_nodes.push_back(m.node_index(i, j));

  // Tiling sanity: triangle areas must sum to the rectangle area.
  double area = 0.0;
  for (const auto& t : m.triangles) {
    const double a = 0.5 * cross(m.nodes[t[1]] - m.nodes[t[0]],
                                 m.nodes[t[2]] - m.nodes[t[0]]);
    if (!(a > 0.0))
      throw NumericalError("build_tri_mesh_2d: nonpositive triangle area");
    area += a;
  }
  if (std::abs(area - rect.area()) > 1e-10 * rect.area())
    throw NumericalError("build_tri_mesh_2d: tiling defect");
  return m;
}

/// Subdivision counts by the ceiling rule on the target edge length.
inline TriMesh2D build_tri_mesh_2d(Rect rect, double h_target) {
  const double w = rect.width(), ht = rect.height();
  if (!(w > 0.0 && ht > 0.0))
    throw std::domain_error("build_tri_mesh_2d: empty rectangle");
  if (!(h_target > 0.0) || h_target >= std::min(w, ht))
    throw std::domain_error("build_tri_mesh_2d: need 0 < h_target < min side");
  const int nx = static_cast<int>(std::ceil(w / h_target - 1e-12));
  const int ny = static_cast<int>(std::ceil(ht / h_target - 1e-12));
  return build_tri_mesh_2d_grid(rect, nx, ny);
}

/// Doubles the grid per side; h halves exactly.
inline TriMesh2D refine(const TriMesh2D& mesh) {
  return build_tri_mesh_2d_grid(mesh.rect, 2 * mesh.nx, 2 * mesh.ny);
}

struct ElementGeometry {
  double area = 0.0;
  std::array<Point, 3> grad;  // gradients of the barycentric coordinates
};

/// Area and the constant P1 shape-function gradients of element k.
inline ElementGeometry element_geometry(const TriMesh2D& mesh, int k) {
  if (k < 0 || k >= mesh.n_elements())
    throw std::domain_error("element_geometry: element index out of range");
  const auto& t = mesh.triangles[static_cast<std::size_t>(k)];
  const Point p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]],
              p2 = mesh.nodes[t[2]];
  const double twice_area = cross(p1 - p0, p2 - p0);
  if (!(twice_area > 0.0))
    throw DataError("element_geometry: degenerate triangle " +
                    std::to_string(k));
  ElementGeometry g;
  g.area = 0.5 * twice_area;
  g.grad[0] = {(p1.y - p2.y) / twice_area, (p2.x - p1.x) / twice_area};
  g.grad[1] = {(p2.y - p0.y) / twice_area, (p0.x - p2.x) / twice_area};
  g.grad[2] = {(p0.y - p1.y) / twice_area, (p1.x - p0.x) / twice_area};
  return g;
}

inline void write_nodes_csv(const TriMesh2D& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "x,y\n";
  for (const auto& p : mesh.nodes)
    out << format_real(p.x) << ',' << format_real(p.y) << '\n';
}

inline void write_elements_csv(const TriMesh2D& mesh,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "n0,n1,n2\n";
  for (const auto& t : mesh.triangles)
    out << t[0] << ',' << t[1] << ',' << t[2] << '\n';
}

}  // namespace upscale

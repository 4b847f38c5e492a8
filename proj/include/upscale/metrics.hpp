#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "upscale/common.hpp"
#include "upscale/fem1d.hpp"
#include "upscale/fem2d.hpp"

namespace upscale {

// ---------------------------------------------------------------------------
// Norms (exact P1 mass/stiffness quadrature)

/// ||u||_L2 from the element mass form h/6 [[2,1],[1,2]].
inline double norm_l2(const FeSolution1D& u) {
  double sum = 0.0;
  for (int e = 0; e < u.mesh->n_elements(); ++e) {
    const double h = u.mesh->nodes[e + 1] - u.mesh->nodes[e];
    const double a = u.values[e], b = u.values[e + 1];
    sum += h / 6.0 * (2.0 * a * a + 2.0 * a * b + 2.0 * b * b);
  }
  return std::sqrt(sum);
}

/// Full H1 norm sqrt(L2^2 + |u|_H1^2); the seminorm comes from the stiffness
/// quadratic form, elementwise (u_{j+1} - u_j)^2 / h.
inline double norm_h1(const FeSolution1D& u) {
  const double l2 = norm_l2(u);
  double semi = 0.0;
  for (int e = 0; e < u.mesh->n_elements(); ++e) {
    const double h = u.mesh->nodes[e + 1] - u.mesh->nodes[e];
    const double d = u.values[e + 1] - u.values[e];
    semi += d * d / h;
  }
  return std::sqrt(l2 * l2 + semi);
}

/// Vector L2 norm, per component with the element mass area/12
/// [[2,1,1],[1,2,1],[1,1,2]].
inline double norm_l2(const FeSolution2D& u) {
  double sum = 0.0;
  for (int e = 0; e < u.mesh->n_elements(); ++e) {
    const auto& t = u.mesh->triangles[static_cast<std::size_t>(e)];
    const double a = element_geometry(*u.mesh, e).area;
    for (int comp = 0; comp < 2; ++comp) {
      const double v0 = u.values[static_cast<std::size_t>(2 * t[0] + comp)];
      const double v1 = u.values[static_cast<std::size_t>(2 * t[1] + comp)];
      const double v2 = u.values[static_cast<std::size_t>(2 * t[2] + comp)];
      sum += a / 12.0 *
             (2.0 * (v0 * v0 + v1 * v1 + v2 * v2) +
              2.0 * (v0 * v1 + v1 * v2 + v0 * v2));
    }
  }
  return std::sqrt(sum);
}

/// Vector H1 norm; seminorm is the gradient contraction per displacement
/// component, integral |grad u_x|^2 + |grad u_y|^2.
inline double norm_h1(const FeSolution2D& u) {
  const double l2 = norm_l2(u);
  double semi = 0.0;
  for (int e = 0; e < u.mesh->n_elements(); ++e) {
    const auto& t = u.mesh->triangles[static_cast<std::size_t>(e)];
    const ElementGeometry g = element_geometry(*u.mesh, e);
    for (int comp = 0; comp < 2; ++comp) {
      Point grad{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        const double v = u.values[static_cast<std::size_t>(2 * t[i] + comp)];
        grad.x += v * g.grad[i].x;
        grad.y += v * g.grad[i].y;
      }
      semi += g.area * dot(grad, grad);
    }
  }
  return std::sqrt(l2 * l2 + semi);
}

// ---------------------------------------------------------------------------
// Differences and interpolation

/// Nodal interpolation onto a target mesh (exact on shared nodes).
inline FeSolution1D interpolate_to(const FeSolution1D& u,
                                   const Mesh1D& target) {
  FeSolution1D v;
  v.mesh = &target;
  v.values.resize(static_cast<std::size_t>(target.n_nodes()));
  for (int j = 0; j < target.n_nodes(); ++j)
    v.values[static_cast<std::size_t>(j)] = u.eval(target.nodes[j]);
  return v;
}

inline FeSolution2D interpolate_to(const FeSolution2D& u,
                                   const TriMesh2D& target) {
  FeSolution2D v;
  v.mesh = &target;
  v.values.resize(static_cast<std::size_t>(2 * target.n_nodes()));
  for (int j = 0; j < target.n_nodes(); ++j) {
    const Point w = u.eval(target.nodes[j]);
    v.values[static_cast<std::size_t>(2 * j)] = w.x;
    v.values[static_cast<std::size_t>(2 * j + 1)] = w.y;
  }
  return v;
}

inline FeSolution1D nodal_difference(const FeSolution1D& a,
                                     const FeSolution1D& b) {
  if (a.mesh != b.mesh || a.values.size() != b.values.size())
    throw DataError("nodal_difference: solutions live on different meshes");
  FeSolution1D d;
  d.mesh = a.mesh;
  d.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d.values[i] = a.values[i] - b.values[i];
  return d;
}

inline FeSolution2D nodal_difference(const FeSolution2D& a,
                                     const FeSolution2D& b) {
  if (a.mesh != b.mesh || a.values.size() != b.values.size())
    throw DataError("nodal_difference: solutions live on different meshes");
  FeSolution2D d;
  d.mesh = a.mesh;
  d.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d.values[i] = a.values[i] - b.values[i];
  return d;
}

/// Max nodal |a - b| (Euclidean per node in 2D).
inline double diff_linf(const FeSolution1D& a, const FeSolution1D& b) {
  const FeSolution1D d = nodal_difference(a, b);
  double m = 0.0;
  for (double v : d.values) m = std::max(m, std::abs(v));
  return m;
}

inline double diff_linf(const FeSolution2D& a, const FeSolution2D& b) {
  const FeSolution2D d = nodal_difference(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < d.values.size(); i += 2)
    m = std::max(m, std::hypot(d.values[i], d.values[i + 1]));
  return m;
}

template <class Solution>
double diff_l2(const Solution& a, const Solution& b) {
  return norm_l2(nodal_difference(a, b));
}

// ---------------------------------------------------------------------------
// Convergence rate

/// Successive-difference rate of a norm sequence sampled at h, h/2, h/4:
/// log2(|n_h - n_{h/2}| / |n_{h/2} - n_{h/4}|).  No exact solution enters;
/// the rate tracks how fast the norm values settle.  A vanishing denominator
/// yields an indeterminate rate (empty optional).
inline std::optional<double> convergence_rate(double norm_h, double norm_h2,
                                              double norm_h4) {
  if (!std::isfinite(norm_h) || !std::isfinite(norm_h2) ||
      !std::isfinite(norm_h4))
    return std::nullopt;
  const double coarse = std::abs(norm_h - norm_h2);
  const double fine = std::abs(norm_h2 - norm_h4);
  if (!(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

// ---------------------------------------------------------------------------
// Reduction ratios

/// Percent length reduction of (a, b) under the displacement u:
/// 100 [(b - a) - ((b + u(b)) - (a + u(a)))] / (b - a).
template <class Eval>
double reduction_ratio_1d_of(Eval&& u, double a, double b) {
  const double len = b - a;
  if (!(len > 0.0))
    throw std::domain_error("reduction_ratio_1d: need a < b");
  const double deformed = (b + u(b)) - (a + u(a));
  if (!(deformed > 0.0))
    throw DataError("reduction_ratio_1d: deformed interval is inverted");
  return 100.0 * (len - deformed) / len;
}

inline double reduction_ratio_1d(const FeSolution1D& u, double a, double b) {
  return reduction_ratio_1d_of([&](double x) { return u.eval(x); }, a, b);
}

/// Counterclockwise samples of the rectangle boundary, spaced at most the
/// mesh grid step apart; corners appear exactly once.
inline std::vector<Point> sample_rect_boundary(Rect region, double step) {
  std::vector<Point> pts;
  const auto side = [&](Point from, Point to) {
    const double len = norm(to - from);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 0; k < n; ++k)
      pts.push_back(from + (static_cast<double>(k) / n) * (to - from));
  };
  side({region.xmin, region.ymin}, {region.xmax, region.ymin});
  side({region.xmax, region.ymin}, {region.xmax, region.ymax});
  side({region.xmax, region.ymax}, {region.xmin, region.ymax});
  side({region.xmin, region.ymax}, {region.xmin, region.ymin});
  return pts;
}

inline double shoelace_area(const std::vector<Point>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    twice += cross(p, q);
  }
  return 0.5 * twice;
}

namespace detail {

inline bool segments_cross(Point a, Point b, Point c, Point d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

inline bool polygon_self_intersects(const std::vector<Point>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // shared endpoint
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j],
                         poly[(j + 1) % n]))
        return true;
    }
  }
  return false;
}

}  // namespace detail

/// Percent area reduction of the region under the displacement field:
/// the boundary is sampled at mesh resolution, displaced by the interpolated
/// field, and measured with the shoelace formula.
inline double reduction_ratio_2d(const FeSolution2D& u, Rect region) {
  const double step = std::min(u.mesh->dx, u.mesh->dy);
  std::vector<Point> poly = sample_rect_boundary(region, step);
  for (auto& p : poly) p = p + u.eval(p);
  if (detail::polygon_self_intersects(poly))
    throw DataError("reduction_ratio_2d: deformed boundary self-intersects");
  const double deformed = shoelace_area(poly);
  if (!(deformed > 0.0))
    throw DataError("reduction_ratio_2d: deformed boundary is inverted");
  const double a0 = region.area();
  return 100.0 * (a0 - deformed) / a0;
}

// ---------------------------------------------------------------------------
// Comparison report

struct ApproachReport {
  double l2_norm = 0.0;
  double h1_norm = 0.0;
  std::optional<double> rate_l2;
  std::optional<double> rate_h1;
  double reduction_ratio_percent = 0.0;
  double wall_time_seconds = 0.0;
};

/// The per-run comparison record: norms, rates, subdomain reduction ratios
/// and wall times per approach, plus the inter-approach differences.
struct ComparisonReport {
  std::optional<ApproachReport> sph;
  std::optional<ApproachReport> density;
  std::optional<double> diff_linf;
  std::optional<double> diff_l2;
  double h = 0.0;
  long n_cells = 0;
  std::uint64_t seed = 0;
  std::string pipeline;

  void validate() const {
    for (const auto* a : {&sph, &density}) {
      if (!a->has_value()) continue;
      const ApproachReport& r = **a;
      if (!std::isfinite(r.reduction_ratio_percent) ||
          !std::isfinite(r.l2_norm) || !std::isfinite(r.h1_norm))
        throw DataError("ComparisonReport: non-finite entries");
      if (r.wall_time_seconds < 0.0)
        throw DataError("ComparisonReport: negative wall time");
    }
    if ((diff_linf && *diff_linf < 0.0) || (diff_l2 && *diff_l2 < 0.0))
      throw DataError("ComparisonReport: negative difference norms");
  }
};

namespace detail {

inline void json_field(std::string& out, const char* key,
                       const std::optional<double>& v, bool comma = true) {
  out += '"';
  out += key;
  out += "\": ";
  out += v ? format_real(*v) : "null";
  if (comma) out += ',';
  out += ' ';
}

inline std::string approach_json(const std::optional<ApproachReport>& a) {
  if (!a) return "null";
  std::string out = "{ ";
  json_field(out, "l2_norm", a->l2_norm);
  json_field(out, "h1_norm", a->h1_norm);
  json_field(out, "rate_l2", a->rate_l2);
  json_field(out, "rate_h1", a->rate_h1);
  json_field(out, "reduction_ratio_percent", a->reduction_ratio_percent);
  json_field(out, "wall_time_seconds", a->wall_time_seconds, false);
  out += '}';
  return out;
}

}  // namespace detail

struct RunMetadata {
  double h = 0.0;
  long n_cells = 0;
  std::uint64_t seed = 0;
  std::string pipeline;
};

struct RatePair {
  std::optional<double> l2;
  std::optional<double> h1;
};

inline ComparisonReport build_report(const CaseResult1D& result,
                                     const Domain1D& dom,
                                     const RunMetadata& meta,
                                     const RatePair& sph_rates = {},
                                     const RatePair& density_rates = {}) {
  if (result.sph.mesh != result.density.mesh)
    throw DataError("build_report: approaches solved on different meshes");
  ComparisonReport rep;
  rep.sph = ApproachReport{norm_l2(result.sph), norm_h1(result.sph),
                           sph_rates.l2, sph_rates.h1,
                           reduction_ratio_1d(result.sph, dom.a, dom.b),
                           result.sph_time.total()};
  rep.density = ApproachReport{
      norm_l2(result.density), norm_h1(result.density), density_rates.l2,
      density_rates.h1, reduction_ratio_1d(result.density, dom.a, dom.b),
      result.density_time.total()};
  rep.diff_linf = diff_linf(result.sph, result.density);
  rep.diff_l2 = diff_l2(result.sph, result.density);
  rep.h = meta.h;
  rep.n_cells = meta.n_cells;
  rep.seed = meta.seed;
  rep.pipeline = meta.pipeline;
  rep.validate();
  return rep;
}

inline ComparisonReport build_report(const CaseResult2D& result, Rect wound,
                                     const RunMetadata& meta,
                                     const RatePair& sph_rates = {},
                                     const RatePair& density_rates = {}) {
  if (result.sph.mesh != result.density.mesh)
    throw DataError("build_report: approaches solved on different meshes");
  ComparisonReport rep;
  rep.sph = ApproachReport{norm_l2(result.sph), norm_h1(result.sph),
                           sph_rates.l2, sph_rates.h1,
                           reduction_ratio_2d(result.sph, wound),
                           result.sph_time.total()};
  rep.density = ApproachReport{norm_l2(result.density),
                               norm_h1(result.density), density_rates.l2,
                               density_rates.h1,
                               reduction_ratio_2d(result.density, wound),
                               result.density_time.total()};
  rep.diff_linf = diff_linf(result.sph, result.density);
  rep.diff_l2 = diff_l2(result.sph, result.density);
  rep.h = meta.h;
  rep.n_cells = meta.n_cells;
  rep.seed = meta.seed;
  rep.pipeline = meta.pipeline;
  rep.validate();
  return rep;
}

/// Numbers carry 17 significant digits, so values round-trip exactly.
inline std::string to_json(const ComparisonReport& report) {
  std::string out = "{\n";
  out += "  \"sph\": " + detail::approach_json(report.sph) + ",\n";
  out += "  \"density\": " + detail::approach_json(report.density) + ",\n";
  out += "  \"diff_linf\": " +
         (report.diff_linf ? format_real(*report.diff_linf)
                           : std::string("null")) +
         ",\n";
  out += "  \"diff_l2\": " +
         (report.diff_l2 ? format_real(*report.diff_l2)
                         : std::string("null")) +
         ",\n";
  out += "  \"h\": " + format_real(report.h) + ",\n";
  out += "  \"N_s\": " + std::to_string(report.n_cells) + ",\n";
  out += "  \"seed\": " + std::to_string(report.seed) + ",\n";
  out += "  \"pipeline\": \"" + report.pipeline + "\"\n";
  out += "}\n";
  return out;
}

}  // namespace upscale

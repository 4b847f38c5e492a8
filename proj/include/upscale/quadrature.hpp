#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "upscale/common.hpp"

namespace upscale {

struct QuadPoint1D {
  double x;  // abscissa on [-1, 1]
  double w;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on P_n (avoids transcribed tables).
template <int N>
inline const std::array<QuadPoint1D, N>& gauss_legendre() {
  static const std::array<QuadPoint1D, N> rule = [] {
    std::array<QuadPoint1D, N> r{};
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return r;
  }();
  return rule;
}

/// integral_a^b f(x) dx by the 16-point Gauss rule.
template <class F>
double integrate_gauss16(F&& f, double a, double b) {
  const auto& rule = gauss_legendre<16>();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (const auto& q : rule) sum += q.w * f(mid + half * q.x);
  return half * sum;
}

struct TriQuadPoint {
  double l0, l1, l2;  // barycentric coordinates
  double w;           // weights sum to 1; multiply by triangle area
};

/// Degree-5 symmetric 7-point rule (centroid + two 3-point orbits).
inline const std::array<TriQuadPoint, 7>& triangle_rule7() {
  static const std::array<TriQuadPoint, 7> rule = [] {
    std::array<TriQuadPoint, 7> r{};
    r[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0};
    const double a1 = 0.797426985353087;
    const double b1 = 0.101286507323456;
    const double w1 = 0.125939180544827;
    const double a2 = 0.059715871789770;
    const double b2 = 0.470142064105115;
    const double w2 = 0.132394152788506;
    r[1] = {a1, b1, b1, w1};
    r[2] = {b1, a1, b1, w1};
    r[3] = {b1, b1, a1, w1};
    r[4] = {a2, b2, b2, w2};
    r[5] = {b2, a2, b2, w2};
    r[6] = {b2, b2, a2, w2};
    return r;
  }();
  return rule;
}

inline double triangle_area(Point p0, Point p1, Point p2) {
  return 0.5 * cross(p1 - p0, p2 - p0);
}

/// 7-point rule applied to one triangle (area given or recomputed).
template <class F>
double integrate_triangle7(F&& f, Point p0, Point p1, Point p2, double area) {
  double sum = 0.0;
  for (const auto& q : triangle_rule7()) {
    const Point x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
    sum += q.w * f(x);
  }
  return area * sum;
}

struct AdaptiveTriOptions {
  // Keep splitting while the leaf edge exceeds this (set to the kernel width
  // when integrating peaked kernels; infinity means purely error-driven).
  double edge_limit = std::numeric_limits<double>::infinity();
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_depth = 12;
};

namespace detail {

inline double max_edge(Point p0, Point p1, Point p2) {
  return std::max({norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)});
}

template <class F>
double adapt_tri(F& f, Point p0, Point p1, Point p2, double coarse,
                 int depth, const AdaptiveTriOptions& opt) {
  const Point m01 = 0.5 * (p0 + p1);
  const Point m12 = 0.5 * (p1 + p2);
  const Point m20 = 0.5 * (p2 + p0);
  const double a = std::abs(triangle_area(p0, m01, m20));
  std::array<std::array<Point, 3>, 4> kids = {{{p0, m01, m20},
                                               {m01, p1, m12},
                                               {m20, m12, p2},
                                               {m01, m12, m20}}};
  std::array<double, 4> vals{};
  double fine = 0.0;
  for (int c = 0; c < 4; ++c) {
    vals[c] = integrate_triangle7(f, kids[c][0], kids[c][1], kids[c][2], a);
    fine += vals[c];
  }
  if (depth >= opt.max_depth) return fine;
  const bool resolved = detail::max_edge(m01, m12, m20) <= opt.edge_limit;
  const double err = std::abs(coarse - fine);
  if (resolved &&
      err <= std::max(opt.rel_tol * std::abs(fine), opt.abs_tol))
    return fine;
  double sum = 0.0;
  for (int c = 0; c < 4; ++c)
    sum += adapt_tri(f, kids[c][0], kids[c][1], kids[c][2], vals[c],
                     depth + 1, opt);
  return sum;
}

}  // namespace detail

/// Adaptive quadrature over one triangle: uniform 4-way subdivision with the
/// 7-point rule per leaf.  Splitting continues while the leaf edge exceeds
/// opt.edge_limit, and beyond that until the local refinement estimate drops
/// under max(rel_tol * |I|, abs_tol) or the depth cap is hit.
template <class F>
double integrate_triangle_adaptive(F&& f, Point p0, Point p1, Point p2,
                                   const AdaptiveTriOptions& opt) {
  const double area = std::abs(triangle_area(p0, p1, p2));
  const double coarse = integrate_triangle7(f, p0, p1, p2, area);
  return detail::adapt_tri(f, p0, p1, p2, coarse, 1, opt);
}

}  // namespace upscale

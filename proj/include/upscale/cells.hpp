#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "upscale/common.hpp"
#include "upscale/mesh.hpp"

namespace upscale {

/// Ordered cell center positions; sorted ascending in 1D, generation order
/// in 2D (y is unused in 1D).
struct CellPopulation {
  int dimension = 1;
  std::vector<Point> positions;

  int size() const { return static_cast<int>(positions.size()); }

  /// Spacing of a uniformly spaced 1D population (needs >= 2 cells).
  double uniform_spacing() const {
    if (dimension != 1 || size() < 2)
      throw std::domain_error(
          "uniform_spacing: needs a 1D population with at least 2 cells");
    const double ds = (positions.back().x - positions.front().x) / (size() - 1);
    for (int i = 1; i < size(); ++i) {
      const double gap = positions[i].x - positions[i - 1].x;
      if (std::abs(gap - ds) > 1e-9 * std::max(1.0, std::abs(ds)) + 1e-12)
        throw std::domain_error("uniform_spacing: population is not uniform");
    }
    return ds;
  }
};

/// n cells at a, a + ds, ..., b with ds = (b - a)/(n - 1).
inline CellPopulation make_uniform_cells_1d(double a, double b, int n) {
  if (n < 0 || (n >= 2 && !(a < b)))
    throw std::domain_error("make_uniform_cells_1d: bad arguments");
  CellPopulation cells;
  cells.dimension = 1;
  cells.positions.reserve(n);
  if (n == 1) {
    cells.positions.push_back({0.5 * (a + b), 0.0});
    return cells;
  }
  for (int i = 0; i < n; ++i)
    cells.positions.push_back({a + (b - a) * i / (n - 1), 0.0});
  if (n > 0) cells.positions.back().x = b;
  return cells;
}

inline CellPopulation make_random_cells_1d(double a, double b, int n,
                                           std::uint64_t seed) {
  if (n < 0 || !(a < b))
    throw std::domain_error("make_random_cells_1d: bad arguments");
  SplitMix64 rng(seed);
  CellPopulation cells;
  cells.dimension = 1;
  cells.positions.reserve(n);
  for (int i = 0; i < n; ++i)
    cells.positions.push_back({a + rng.next_unit() * (b - a), 0.0});
  std::sort(cells.positions.begin(), cells.positions.end(),
            [](Point p, Point q) { return p.x < q.x; });
  return cells;
}

// ---------------------------------------------------------------------------
// Density fields

struct Gaussian1d {
  double amplitude, mean, sd;
  double operator()(double x) const {
    const double z = (x - mean) / sd;
    return amplitude * std::exp(-0.5 * z * z) /
           (std::sqrt(2.0 * std::numbers::pi) * sd);
  }
};

struct Sine1d {
  double amplitude, frequency;
  double operator()(double x) const {
    return amplitude * std::abs(std::sin(frequency * x));
  }
};

/// Per-element constant density bound to a 1D mesh.
struct PiecewiseConstant1d {
  const Mesh1D* mesh = nullptr;
  std::vector<double> values;
};

using DensityField1d = std::variant<Gaussian1d, Sine1d, PiecewiseConstant1d>;

inline double density_value(const DensityField1d& field, double x) {
  if (const auto* g = std::get_if<Gaussian1d>(&field)) return (*g)(x);
  if (const auto* s = std::get_if<Sine1d>(&field)) return (*s)(x);
  const auto& pw = std::get<PiecewiseConstant1d>(field);
  const int e = pw.mesh->locate(x);
  if (e < 0) throw DataError("density_value: x outside the density mesh");
  return pw.values[static_cast<std::size_t>(e)];
}

struct Gaussian2d {
  double amplitude;  // amplitude * (1/2 pi) exp(-|x|^2 / 2)
  double operator()(Point p) const {
    return amplitude * std::exp(-0.5 * (p.x * p.x + p.y * p.y)) /
           (2.0 * std::numbers::pi);
  }
};

struct PiecewiseConstant2d {
  const TriMesh2D* mesh = nullptr;
  std::vector<double> values;
};

using DensityField2d = std::variant<Gaussian2d, PiecewiseConstant2d>;

inline double density_value(const DensityField2d& field, Point p) {
  if (const auto* g = std::get_if<Gaussian2d>(&field)) return (*g)(p);
  const auto& pw = std::get<PiecewiseConstant2d>(field);
  const int e = pw.mesh->locate(p);
  if (e < 0) throw DataError("density_value: point outside the density mesh");
  return pw.values[static_cast<std::size_t>(e)];
}

// ---------------------------------------------------------------------------
// Sampling: density -> positions

enum class Placement { equispaced, seeded_random };

/// Bin length d for the 1D pipeline (2D always uses 1x1 squares) and how
/// cells are placed inside a bin.
struct SamplingConfig {
  double bin_length = 1.0;
  Placement placement = Placement::equispaced;
  std::uint64_t seed = 0;
};

namespace detail {

/// Round half away from zero, as std::round does.
inline int round_count(double v) {
  return static_cast<int>(std::llround(v));
}

template <class F>
double midpoint_integral_1d(F&& f, double lo, double hi, int n) {
  const double w = (hi - lo) / n;
  double sum = 0.0;
  for (int q = 0; q < n; ++q) {
    const double v = f(lo + (q + 0.5) * w);
    if (v < 0.0) throw DataError("sample_cells: negative density value");
    sum += v;
  }
  return sum * w;
}

}  // namespace detail

/// Bins of length d tile (0, L) from 0 (last bin possibly short); per bin the
/// cell count is round(integral of the density, 64-point composite midpoint)
/// and cell k of m sits at bin_start + (k - 1/2) * bin_width / m.
inline CellPopulation sample_cells_1d(const DensityField1d& density,
                                      const Domain1D& dom,
                                      const SamplingConfig& cfg) {
  if (!(cfg.bin_length > 0.0) || cfg.bin_length > dom.length)
    throw std::domain_error("sample_cells_1d: need 0 < d <= L");
  SplitMix64 rng(cfg.seed);
  CellPopulation cells;
  cells.dimension = 1;
  const int nbins =
      static_cast<int>(std::ceil(dom.length / cfg.bin_length - 1e-12));
  for (int bin = 0; bin < nbins; ++bin) {
    const double lo = bin * cfg.bin_length;
    const double hi = std::min(dom.length, (bin + 1) * cfg.bin_length);
    const double mass = detail::midpoint_integral_1d(
        [&](double x) { return density_value(density, x); }, lo, hi, 64);
    const int m = detail::round_count(mass);
    const double w = hi - lo;
    for (int k = 1; k <= m; ++k) {
      const double x = cfg.placement == Placement::equispaced
                           ? lo + (k - 0.5) * w / m
                           : lo + rng.next_unit() * w;
      cells.positions.push_back({x, 0.0});
    }
  }
  std::sort(cells.positions.begin(), cells.positions.end(),
            [](Point p, Point q) { return p.x < q.x; });
  return cells;
}

/// 1x1 squares tile the rectangle from its lower-left corner (last row and
/// column possibly short); per square the count is round(integral, 16x16
/// tensor midpoint).  Equispaced placement fills a ceil(sqrt(m))-square
/// subgrid row-major and keeps the first m subcell centers; seeded_random
/// draws m i.i.d. uniform points from the splitmix64 stream.
inline CellPopulation sample_cells_2d(const DensityField2d& density,
                                      Rect domain,
                                      const SamplingConfig& cfg) {
  if (!(domain.width() > 0.0 && domain.height() > 0.0))
    throw std::domain_error("sample_cells_2d: empty domain");
  SplitMix64 rng(cfg.seed);
  CellPopulation cells;
  cells.dimension = 2;
  const int ncols = static_cast<int>(std::ceil(domain.width() - 1e-12));
  const int nrows = static_cast<int>(std::ceil(domain.height() - 1e-12));
  for (int row = 0; row < nrows; ++row) {
    for (int col = 0; col < ncols; ++col) {
      const double x0 = domain.xmin + col;
      const double y0 = domain.ymin + row;
      const double x1 = std::min(domain.xmax, x0 + 1.0);
      const double y1 = std::min(domain.ymax, y0 + 1.0);
      const double wx = x1 - x0, wy = y1 - y0;
      double mass = 0.0;
      for (int qy = 0; qy < 16; ++qy)
        for (int qx = 0; qx < 16; ++qx) {
          const double v = density_value(
              density, {x0 + (qx + 0.5) * wx / 16.0,
                        y0 + (qy + 0.5) * wy / 16.0});
          if (v < 0.0) throw DataError("sample_cells: negative density value");
          mass += v;
        }
      mass *= wx * wy / 256.0;
      const int m = detail::round_count(mass);
      if (m == 0) continue;
      if (cfg.placement == Placement::equispaced) {
        const int g =
            static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
        int placed = 0;
        for (int r = 0; r < g && placed < m; ++r)
          for (int c = 0; c < g && placed < m; ++c, ++placed)
            cells.positions.push_back(
                {x0 + (c + 0.5) * wx / g, y0 + (r + 0.5) * wy / g});
      } else {
        for (int k = 0; k < m; ++k) {
          const double x = x0 + rng.next_unit() * wx;
          const double y = y0 + rng.next_unit() * wy;
          cells.positions.push_back({x, y});
        }
      }
    }
  }
  return cells;
}

/// n i.i.d. uniform points in the region; per point x is drawn before y.
inline CellPopulation place_cells_random_2d(int n, Rect region,
                                            std::uint64_t seed) {
  if (n < 0) throw std::domain_error("place_cells_random_2d: n < 0");
  if (!(region.width() > 0.0 && region.height() > 0.0))
    throw std::domain_error("place_cells_random_2d: empty region");
  SplitMix64 rng(seed);
  CellPopulation cells;
  cells.dimension = 2;
  cells.positions.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = region.xmin + rng.next_unit() * region.width();
    const double y = region.ymin + rng.next_unit() * region.height();
    cells.positions.push_back({x, y});
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Counting: positions -> density

/// Per-element density: cell count divided by element length.  Cells on a
/// shared node go to the element with the lower index.
inline PiecewiseConstant1d density_from_positions(const Mesh1D& mesh,
                                                  const CellPopulation& cells) {
  PiecewiseConstant1d field;
  field.mesh = &mesh;
  field.values.assign(static_cast<std::size_t>(mesh.n_elements()), 0.0);
  for (int i = 0; i < cells.size(); ++i) {
    const double x = cells.positions[static_cast<std::size_t>(i)].x;
    const int e = (x > 0.0 && x < mesh.length) ? mesh.locate(x) : -1;
    if (e < 0)
      throw DataError("density_from_positions: cell " + std::to_string(i) +
                      " outside the mesh domain");
    field.values[static_cast<std::size_t>(e)] += 1.0;
  }
  for (auto& v : field.values) v /= mesh.h;
  return field;
}

/// Per-element density: cell count divided by triangle area; boundary ties
/// go to the lower element index.
inline PiecewiseConstant2d density_from_positions(const TriMesh2D& mesh,
                                                  const CellPopulation& cells) {
  PiecewiseConstant2d field;
  field.mesh = &mesh;
  field.values.assign(static_cast<std::size_t>(mesh.n_elements()), 0.0);
  for (int i = 0; i < cells.size(); ++i) {
    const Point p = cells.positions[static_cast<std::size_t>(i)];
    const int e = mesh.rect.strictly_contains(p) ? mesh.locate(p) : -1;
    if (e < 0)
      throw DataError("density_from_positions: cell " + std::to_string(i) +
                      " outside the mesh domain");
    field.values[static_cast<std::size_t>(e)] += 1.0;
  }
  for (int e = 0; e < mesh.n_elements(); ++e)
    field.values[static_cast<std::size_t>(e)] /=
        element_geometry(mesh, e).area;
  return field;
}

// ---------------------------------------------------------------------------
// CSV interchange

inline void write_cells_csv(const CellPopulation& cells,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << (cells.dimension == 1 ? "x\n" : "x,y\n");
  for (const auto& p : cells.positions) {
    out << format_real(p.x);
    if (cells.dimension == 2) out << ',' << format_real(p.y);
    out << '\n';
  }
}

inline CellPopulation read_cells_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  CellPopulation cells;
  if (line == "x")
    cells.dimension = 1;
  else if (line == "x,y")
    cells.dimension = 2;
  else
    throw DataError(path + ": expected header 'x' or 'x,y'");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    Point p;
    char comma = ',';
    if (!(ss >> p.x) || (cells.dimension == 2 && !(ss >> comma >> p.y)))
      throw DataError(path + ": bad row " + std::to_string(row));
    cells.positions.push_back(p);
  }
  return cells;
}

}  // namespace upscale

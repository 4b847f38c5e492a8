#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace upscale {

/// Input data violates a contract (cell outside mesh, malformed file, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An algorithm failed numerically (zero pivot, solver stagnation, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::sqrt(dot(p, p)); }

/// Axis-aligned rectangle, sides parallel to the coordinate axes.
struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

  bool operator==(const Rect&) const = default;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  bool strictly_contains(Point p) const {
    return p.x > xmin && p.x < xmax && p.y > ymin && p.y < ymax;
  }
};

/// 1D computational domain (0, length) with the subdomain (a, b) that holds
/// the biological cells.  Requires 0 < a < b < length.
struct Domain1D {
  double length;
  double a;
  double b;

  Domain1D(double length_, double a_, double b_)
      : length(length_), a(a_), b(b_) {
    if (!(std::isfinite(length) && std::isfinite(a) && std::isfinite(b)))
      throw std::domain_error("Domain1D: non-finite bounds");
    if (!(0.0 < a && a < b && b < length))
      throw std::domain_error("Domain1D: need 0 < a < b < length");
  }
};

/// Force magnitude P plus the rule that fixes the Gaussian width of the
/// regularized point forces: an explicit width, or h/3 from the mesh.
struct ForceModel {
  double magnitude = 1.0;
  std::optional<double> explicit_width;  // empty => width = h/3

  double width_for(double mesh_h) const {
    if (explicit_width) {
      if (!(*explicit_width > 0.0))
        throw std::domain_error("ForceModel: explicit width must be > 0");
      return *explicit_width;
    }
    return mesh_h / 3.0;
  }
};

/// splitmix64 stream; chosen for trivially portable, bit-exact replay.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Next value mapped to [0, 1): top 53 bits over 2^53 (the double-precision
  /// realization of value / 2^64; exact, never returns 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Decimal form with 17 significant digits; round-trips binary64 exactly.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class WallTimer {
 public:
  WallTimer() : start_(clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

}  // namespace upscale

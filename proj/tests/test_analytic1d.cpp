#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "upscale/analytic1d.hpp"
#include "upscale/kernels.hpp"

using namespace upscale;

namespace {

/// Second-order finite-difference oracle for the smoothed-particle boundary
/// value problem -u'' = P ds sum_i d/dx delta_ds(x - s_i), u(0) = u(L) = 0,
/// solved on a uniform grid with n interior points.
std::vector<double> fd_solve_sph(const CellPopulation& cells, double length,
                                 double p, int n) {
  const double ds = cells.uniform_spacing();
  const double dx = length / (n + 1);
  std::vector<double> rhs(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 1) * dx;
    double f = 0.0;
    for (const auto& c : cells.positions)
      f += gaussian_delta_deriv(x, GaussianKernel(c.x, ds));
    rhs[i] = p * ds * f * dx * dx;
  }
  // Tridiagonal (-1, 2, -1) Thomas solve.
  std::vector<double> c(n, 0.0), d(n, 0.0), u(n, 0.0);
  c[0] = -1.0 / 2.0;
  d[0] = rhs[0] / 2.0;
  for (int i = 1; i < n; ++i) {
    const double m = 2.0 + c[i - 1];
    c[i] = -1.0 / m;
    d[i] = (rhs[i] + d[i - 1]) / m;
  }
  u[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = d[i] - c[i] * u[i + 1];
  return u;
}

}  // namespace

TEST_CASE("greens_1d values and symmetry") {
  CHECK(greens_1d(0.0, 2.0, 7.0) == 0.0);
  CHECK(greens_1d(7.0, 2.0, 7.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(greens_1d(3.5, 2.0, 7.0) == Catch::Approx(1.0).margin(1e-15));
  SplitMix64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const double x = 0.2 + 6.5 * rng.next_unit();
    const double y = 0.2 + 6.5 * rng.next_unit();
    CHECK(greens_1d(x, y, 7.0) ==
          Catch::Approx(greens_1d(y, x, 7.0)).margin(1e-13));
  }
  CHECK_THROWS_AS(greens_1d(-0.1, 2.0, 7.0), std::domain_error);
  CHECK_THROWS_AS(greens_1d(1.0, 0.0, 7.0), std::domain_error);
  CHECK_THROWS_AS(greens_1d(1.0, 7.0, 7.0), std::domain_error);
}

TEST_CASE("continuum displacement boundary, midpoint and value") {
  const Domain1D dom(7.0, 2.0, 5.0);
  const ForceModel force{1.0, {}};
  CHECK(u_density_exact(0.0, dom, force) == 0.0);
  CHECK(u_density_exact(7.0, dom, force) == Catch::Approx(0.0).margin(1e-15));
  CHECK(u_density_exact(3.5, dom, force) == Catch::Approx(0.0).margin(1e-14));
  CHECK(u_density_exact(2.0, dom, force) ==
        Catch::Approx(6.0 / 7.0).margin(1e-14));
}

TEST_CASE("continuum displacement is piecewise linear with P-jumps") {
  const Domain1D dom(7.0, 2.0, 5.0);
  const double p = 1.3;
  const ForceModel force{p, {}};
  const auto u = [&](double x) { return u_density_exact(x, dom, force); };
  // Zero curvature away from the kinks.
  for (double x : {0.7, 1.4, 3.0, 4.2, 6.1}) {
    const double d2 = u(x - 0.01) - 2.0 * u(x) + u(x + 0.01);
    CHECK(std::abs(d2) < 1e-10);
  }
  // One-sided slopes: jump +P across a, -P across b (left minus right).
  const double eps = 1e-7;
  const double slope_left_a = (u(2.0) - u(2.0 - eps)) / eps;
  const double slope_right_a = (u(2.0 + eps) - u(2.0)) / eps;
  CHECK(slope_left_a - slope_right_a == Catch::Approx(p).margin(1e-6));
  const double slope_left_b = (u(5.0) - u(5.0 - eps)) / eps;
  const double slope_right_b = (u(5.0 + eps) - u(5.0)) / eps;
  CHECK(slope_left_b - slope_right_b == Catch::Approx(-p).margin(1e-6));
}

TEST_CASE("dipole solution is antisymmetric about a centered cell") {
  const double length = 7.0;
  for (double y : {0.1, 0.5, 1.2, 3.0}) {
    const double up = u_dipole_exact(length / 2 + y, length / 2, length, 0.3);
    const double um = u_dipole_exact(length / 2 - y, length / 2, length, 0.3);
    CHECK(up == Catch::Approx(-um).margin(1e-14));
  }
}

TEST_CASE("superposed solution vanishes at the boundary") {
  const Domain1D dom(7.0, 2.0, 5.0);
  const ForceModel force{1.0, {}};
  const CellPopulation cells = make_uniform_cells_1d(2.0, 5.0, 51);
  CHECK(std::abs(u_sph_exact(0.0, cells, dom, force)) < 1e-10);
  CHECK(std::abs(u_sph_exact(7.0, cells, dom, force)) < 1e-10);

  CellPopulation lonely;
  lonely.dimension = 1;
  lonely.positions = {{3.5, 0.0}};
  CHECK_THROWS_AS(u_sph_exact(1.0, lonely, dom, force), std::domain_error);
}

TEST_CASE("superposed solution matches a finite-difference solve") {
  const Domain1D dom(7.0, 2.0, 5.0);
  const ForceModel force{1.0, {}};
  const CellPopulation cells = make_uniform_cells_1d(2.0, 5.0, 101);
  const int n = 99999;  // 1e5 grid points
  const std::vector<double> fd = fd_solve_sph(cells, dom.length, 1.0, n);
  const double dx = dom.length / (n + 1);
  double max_err = 0.0, max_u = 0.0;
  for (int i = 0; i < n; i += 37) {
    const double x = (i + 1) * dx;
    const double exact = u_sph_exact(x, cells, dom, force);
    max_err = std::max(max_err, std::abs(exact - fd[i]));
    max_u = std::max(max_u, std::abs(exact));
  }
  CHECK(max_err < 0.01 * max_u);
}

TEST_CASE("the two exact solutions approach each other as spacing shrinks") {
  const Domain1D dom(7.0, 2.0, 5.0);
  const ForceModel force{1.0, {}};
  std::vector<double> sup_diffs;
  double sup_u2 = 0.0;
  for (double ds : {0.3, 0.06, 0.03, 0.006}) {
    const int n = static_cast<int>(std::lround(3.0 / ds)) + 1;
    const CellPopulation cells = make_uniform_cells_1d(2.0, 5.0, n);
    CHECK(cells.uniform_spacing() == Catch::Approx(ds).margin(1e-12));
    double sup = 0.0;
    for (int i = 0; i <= 1400; ++i) {
      const double x = 7.0 * i / 1400.0;
      const double u1 = u_sph_exact(x, cells, dom, force);
      const double u2 = u_density_exact(x, dom, force);
      sup = std::max(sup, std::abs(u1 - u2));
      sup_u2 = std::max(sup_u2, std::abs(u2));
    }
    sup_diffs.push_back(sup);
  }
  for (std::size_t i = 1; i < sup_diffs.size(); ++i)
    CHECK(sup_diffs[i] < sup_diffs[i - 1]);
  CHECK(sup_diffs.back() < 0.02 * sup_u2);
}

// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria.  Runs the desk-scale experiment set end to end.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "upscale/analytic1d.hpp"
#include "upscale/cells.hpp"
#include "upscale/config.hpp"
#include "upscale/fem1d.hpp"
#include "upscale/fem2d.hpp"
#include "upscale/kernels.hpp"
#include "upscale/metrics.hpp"
#include "upscale/runner.hpp"

using namespace upscale;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("%s  criterion %d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL",
              number, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

RunConfig base_1d_uniform(double h_target, int cells, int levels) {
  RunConfig cfg;
  cfg.dimension = 1;
  cfg.length = 7.0;
  cfg.a = 2.0;
  cfg.b = 5.0;
  cfg.pipeline = Pipeline::from_positions;
  cfg.cells = CellSourceSpec{CellSourceSpec::Kind::uniform, cells, ""};
  cfg.h_target = h_target;
  cfg.levels = levels;
  return cfg;
}

// --------------------------------------------------------------- criterion 1
void criterion_empirical_rule() {
  WallTimer timer;
  const GaussianKernel k(0.0, 1.0);
  const double m1 = gaussian_interval_mass(-1.0, 1.0, k);
  const double m2 = gaussian_interval_mass(-2.0, 2.0, k);
  const double m3 = gaussian_interval_mass(-3.0, 3.0, k);
  const bool pass = std::abs(m1 - 0.6827) <= 5e-4 &&
                    std::abs(m2 - 0.9545) <= 5e-4 &&
                    std::abs(m3 - 0.9973) <= 5e-4;
  report(1, "empirical rule interval masses", pass,
         fmt(m1) + " / " + fmt(m2) + " / " + fmt(m3) + " vs 0.6827 / 0.9545 / "
         "0.9973, tol 5e-4",
         timer.seconds());
}

// --------------------------------------------------------------- criterion 2
void criterion_analytic_consistency() {
  WallTimer timer;
  const Domain1D dom(7.0, 2.0, 5.0);
  const ForceModel force{1.0, {}};
  std::vector<double> sups;
  double sup_u2 = 0.0;
  for (double ds : {0.3, 0.06, 0.03, 0.006}) {
    const int n = static_cast<int>(std::lround(3.0 / ds)) + 1;
    const CellPopulation cells = make_uniform_cells_1d(2.0, 5.0, n);
    double sup = 0.0;
    for (int i = 0; i <= 1400; ++i) {
      const double x = 7.0 * i / 1400.0;
      const double u1 = u_sph_exact(x, cells, dom, force);
      const double u2 = u_density_exact(x, dom, force);
      sup = std::max(sup, std::abs(u1 - u2));
      sup_u2 = std::max(sup_u2, std::abs(u2));
    }
    sups.push_back(sup);
  }
  const double rel = sups.back() / sup_u2;
  const bool pass = strictly_decreasing(sups) && rel < 0.02;
  report(2, "1D analytic consistency over the spacing ladder", pass,
         "sup diffs " + fmt(sups[0]) + " > " + fmt(sups[1]) + " > " +
             fmt(sups[2]) + " > " + fmt(sups[3]) + ", final rel " + fmt(rel) +
             " < 0.02",
         timer.seconds());
}

// --------------------------------------------------------------- criterion 3
void criterion_theorem1_desk() {
  WallTimer timer;
  const CellPopulation cells = make_uniform_cells_1d(2.0, 5.0, 50);
  std::vector<double> diffs;
  double ratio_gap = -1.0;
  for (double h : {0.7, 0.07, 0.014, 0.007}) {
    const Mesh1D mesh = build_mesh_1d(7.0, h);
    const DensityField1d density = density_from_positions(mesh, cells);
    const CaseResult1D r =
        run_case_1d(mesh, cells, density, ForceModel{1.0, {}});
    diffs.push_back(diff_linf(r.sph, r.density));
    if (h == 0.07) {
      const double rs = reduction_ratio_1d(r.sph, 2.0, 5.0);
      const double rd = reduction_ratio_1d(r.density, 2.0, 5.0);
      ratio_gap = std::abs(rs - rd) / std::abs(rd);
    }
  }
  const bool pass = strictly_decreasing(diffs) && ratio_gap < 0.005;
  report(3, "theorem-1 ladder and reduction-ratio agreement", pass,
         "diff_linf " + fmt(diffs[0]) + " > ... > " + fmt(diffs[3]) +
             ", ratio gap " + fmt(ratio_gap) + " < 0.005 at h=0.07",
         timer.seconds());
}

// --------------------------------------------------------------- criterion 4
void criterion_rates_1d() {
  WallTimer timer;
  const RunConfig cfg = base_1d_uniform(0.07, 50, 3);
  const Inputs1D in = resolve_inputs_1d(cfg);
  const Ladder1D ladder = run_ladder_1d(cfg, in);
  const double rates[4] = {
      ladder.sph_rates.l2.value_or(-1.0), ladder.sph_rates.h1.value_or(-1.0),
      ladder.density_rates.l2.value_or(-1.0),
      ladder.density_rates.h1.value_or(-1.0)};
  bool pass = true;
  for (double r : rates) pass = pass && r >= 0.85 && r <= 1.15;
  report(4, "1D convergence rates in [0.85, 1.15]", pass,
         "L2/H1 sph " + fmt(rates[0]) + "/" + fmt(rates[1]) + ", density " +
             fmt(rates[2]) + "/" + fmt(rates[3]),
         timer.seconds());
}

// --------------------------------------------------------------- criterion 5
void criterion_random_positions() {
  WallTimer timer;
  int monotone = 0;
  const int counts[4] = {10, 50, 100, 500};
  for (int trial = 0; trial < 20; ++trial) {
    const CellPopulation cells = make_random_cells_1d(
        2.0, 5.0, counts[trial % 4], 4242 + trial);
    Mesh1D mesh = build_mesh_1d(7.0, 0.07);
    std::vector<double> diffs;
    for (int level = 0; level < 3; ++level) {
      if (level > 0) mesh = refine(mesh);
      const DensityField1d density = density_from_positions(mesh, cells);
      const CaseResult1D r =
          run_case_1d(mesh, cells, density, ForceModel{1.0, {}});
      diffs.push_back(diff_linf(r.sph, r.density));
    }
    if (diffs[1] < diffs[0] && diffs[2] < diffs[1]) ++monotone;
  }
  const bool pass = monotone >= 19;
  report(5, "random 1D populations converge under refinement", pass,
         std::to_string(monotone) + "/20 ladders monotone (need >= 19)",
         timer.seconds());
}

// ----------------------------------------------------------- criteria 6 + 7
struct Ladder2dOutcome {
  std::vector<double> diffs;
  double ratio_sph = 0.0;
  double ratio_density = 0.0;
};

Ladder2dOutcome run_2d_experiment(const RunConfig& cfg, const Inputs2D& in) {
  const Ladder2D ladder = run_ladder_2d(cfg, in);
  Ladder2dOutcome out;
  for (const auto& level : ladder.levels) out.diffs.push_back(level.diff_l2);
  out.ratio_sph = reduction_ratio_2d(ladder.results.back().sph, cfg.wound);
  out.ratio_density =
      reduction_ratio_2d(ladder.results.back().density, cfg.wound);
  return out;
}

void criteria_2d_ladders() {
  WallTimer timer;
  // Experiment 1: 196 seeded random cells in the wound region.
  RunConfig random_cfg;
  random_cfg.dimension = 2;
  random_cfg.pipeline = Pipeline::from_positions;
  random_cfg.cells = CellSourceSpec{CellSourceSpec::Kind::random, 196, ""};
  random_cfg.seed = 42;
  random_cfg.h_target = 0.64;
  random_cfg.levels = 3;
  random_cfg.force_p = 0.1;
  random_cfg.threads = 4;
  const Ladder2dOutcome random_out =
      run_2d_experiment(random_cfg, resolve_inputs_2d(random_cfg));

  // Experiment 2: cells sampled once from the radial Gaussian density, then
  // both formulations run from the same positions.
  Inputs2D gauss_in;
  SamplingConfig sampling;
  gauss_in.cells = sample_cells_2d(DensityField2d{Gaussian2d{50.0}},
                                   random_cfg.omega, sampling);
  const Ladder2dOutcome gauss_out = run_2d_experiment(random_cfg, gauss_in);
  const double t67 = timer.seconds();

  const bool pass6 = strictly_decreasing(random_out.diffs) &&
                     strictly_decreasing(gauss_out.diffs);
  report(6, "2D L2 gap shrinks along both experiment ladders", pass6,
         "random " + fmt(random_out.diffs[0]) + " > " +
             fmt(random_out.diffs[1]) + " > " + fmt(random_out.diffs[2]) +
             "; gaussian " + fmt(gauss_out.diffs[0]) + " > " +
             fmt(gauss_out.diffs[1]) + " > " + fmt(gauss_out.diffs[2]),
         t67);

  const double gap_random =
      std::abs(random_out.ratio_sph - random_out.ratio_density) /
      std::abs(random_out.ratio_density);
  const double gap_gauss =
      std::abs(gauss_out.ratio_sph - gauss_out.ratio_density) /
      std::abs(gauss_out.ratio_density);
  const bool pass7 = gap_random < 0.05 && gap_gauss < 0.05;
  report(7, "2D reduction ratios agree within 5% at the finest level", pass7,
         "random " + fmt(random_out.ratio_sph) + "% vs " +
             fmt(random_out.ratio_density) + "% (gap " + fmt(gap_random) +
             "); gaussian " + fmt(gauss_out.ratio_sph) + "% vs " +
             fmt(gauss_out.ratio_density) + "% (gap " + fmt(gap_gauss) + ")",
         0.0);
}

// --------------------------------------------------------------- criterion 8
double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

void criterion_cost_asymmetry() {
  WallTimer timer;

  // 1D: uniform 500 cells at h = 0.007.
  const Mesh1D mesh = build_mesh_1d(7.0, 0.007);
  const CellPopulation cells500 = make_uniform_cells_1d(2.0, 5.0, 500);
  const DensityField1d density = density_from_positions(mesh, cells500);
  double sph_total = 0.0, den_total = 0.0;
  {
    double s[3], d[3];
    for (int rep = 0; rep < 3; ++rep) {
      const CaseResult1D r =
          run_case_1d(mesh, cells500, density, ForceModel{1.0, {}});
      s[rep] = r.sph_time.total();
      d[rep] = r.density_time.total();
    }
    sph_total = median3(s[0], s[1], s[2]);
    den_total = median3(d[0], d[1], d[2]);
  }
  const double ratio_1d = sph_total / den_total;

  // 1D load-time scaling across N_s in {50, 500} at fixed h.
  const CellPopulation cells50 = make_uniform_cells_1d(2.0, 5.0, 50);
  auto time_load = [&](const CellPopulation& cells) {
    double best = 1e100;
    for (int rep = 0; rep < 5; ++rep) {
      WallTimer t;
      const auto f = load_1d(mesh, SphSource1d{&cells, ForceModel{1.0, {}}});
      best = std::min(best, t.seconds());
      if (f.size() == 0) std::abort();  // keep the load from being elided
    }
    return best;
  };
  const double t50 = time_load(cells50);
  const double t500 = time_load(cells500);
  const double slope = std::log(t500 / t50) / std::log(10.0);

  // 2D: 440 seeded random cells on the finest ladder mesh.
  std::vector<TriMesh2D> meshes;
  meshes.push_back(build_tri_mesh_2d(Rect{-10.0, -10.0, 10.0, 10.0}, 0.64));
  meshes.push_back(refine(meshes.back()));
  meshes.push_back(refine(meshes.back()));
  const TriMesh2D& finest = meshes.back();
  const CellPopulation cells440 =
      place_cells_random_2d(440, Rect{-5.0, -5.0, 5.0, 5.0}, 4242);
  const DensityField2d counted = density_from_positions(finest, cells440);
  const CaseResult2D r2 = run_case_2d(finest, MaterialParams(1.0, 0.3),
                                      ForceModel{0.1, {}}, cells440, counted);
  const double ratio_2d = r2.sph_time.total() / r2.density_time.total();

  const bool pass = ratio_1d >= 5.0 && slope >= 0.8 && ratio_2d >= 5.0;
  report(8, "agent-based cost exceeds continuum cost", pass,
         "1D ratio " + fmt(ratio_1d) + " (>= 5), load slope " + fmt(slope) +
             " (>= 0.8), 2D ratio " + fmt(ratio_2d) + " (>= 5)",
         timer.seconds());
}

// --------------------------------------------------------------- criterion 9
void criterion_oracles() {
  WallTimer timer;
  bool pass = true;
  std::string detail;

  // (a) 1D stiffness vs quadrature-assembled dense oracle.
  {
    const Mesh1D mesh = build_mesh_1d(1.0, 0.34);
    const TridiagonalSystem sys = assemble_stiffness_1d(mesh);
    const auto dense = oracles::stiffness_by_quadrature(mesh);
    double err = 0.0;
    for (int i = 0; i < sys.size(); ++i)
      for (int j = 0; j < sys.size(); ++j) {
        double v = 0.0;
        if (i == j) v = sys.diag[i];
        else if (j == i - 1) v = sys.sub[i];
        else if (j == i + 1) v = sys.super[i];
        err = std::max(err, std::abs(v - dense[i][j]));
      }
    pass = pass && err <= 1e-10;
    detail += "stiffness err " + fmt(err);
  }

  // (b) Thomas solve vs dense elimination.
  {
    SplitMix64 rng(99);
    const Mesh1D mesh = build_mesh_1d(1.0, 1.0 / 60.0);
    const int n = mesh.n_nodes();
    TridiagonalSystem sys;
    sys.sub.assign(n, 0.0);
    sys.diag.assign(n, 0.0);
    sys.super.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      sys.rhs[j] = rng.next_unit() - 0.5;
      if (j > 0) sys.sub[j] = -(0.2 + rng.next_unit());
    }
    for (int j = 0; j + 1 < n; ++j) sys.super[j] = sys.sub[j + 1];
    for (int j = 0; j < n; ++j)
      sys.diag[j] = 1.0 + std::abs(j > 0 ? sys.sub[j] : 0.0) +
                    std::abs(j + 1 < n ? sys.super[j] : 0.0);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
      dense[j][j] = sys.diag[j];
      if (j > 0) dense[j][j - 1] = sys.sub[j];
      if (j + 1 < n) dense[j][j + 1] = sys.super[j];
    }
    const auto expected = oracles::dense_solve(dense, sys.rhs);
    const Mesh1D& bound = mesh;
    const FeSolution1D got = solve_dirichlet_1d(sys, bound);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
      err = std::max(err, std::abs(got.values[j] - expected[j]));
    pass = pass && err <= 1e-10;
    detail += ", tridiag err " + fmt(err);
  }

  // (c) 2D element stiffness rigid-body kernel.
  {
    const TriMesh2D mesh = build_tri_mesh_2d(Rect{-1.0, 0.0, 2.0, 2.0}, 0.43);
    const Mat3 d = elasticity_matrix(MaterialParams(1.0, 0.3));
    double worst = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
      const Mat6 ke = element_stiffness(element_geometry(mesh, e), d);
      double modes[3][6];
      for (int i = 0; i < 3; ++i) {
        modes[0][2 * i] = 1.0;
        modes[0][2 * i + 1] = 0.0;
        modes[1][2 * i] = 0.0;
        modes[1][2 * i + 1] = 1.0;
        modes[2][2 * i] = -mesh.nodes[t[i]].y;
        modes[2][2 * i + 1] = mesh.nodes[t[i]].x;
      }
      for (const auto& mode : modes)
        for (int r = 0; r < 6; ++r) {
          double sum = 0.0;
          for (int c = 0; c < 6; ++c) sum += ke[r][c] * mode[c];
          worst = std::max(worst, std::abs(sum));
        }
    }
    pass = pass && worst <= 1e-12;
    detail += ", rigid modes " + fmt(worst);
  }

  // (d) Load component sums vanish before boundary elimination.
  {
    const Mesh1D mesh = build_mesh_1d(7.0, 0.07);
    const CellPopulation cells = make_random_cells_1d(2.0, 5.0, 40, 5);
    const auto f1 = load_1d(mesh, SphSource1d{&cells, ForceModel{1.0, {}}});
    double sum = 0.0, norm1 = 0.0;
    for (double v : f1) {
      sum += v;
      norm1 += std::abs(v);
    }
    double worst = std::abs(sum) / std::max(1e-30, norm1);

    const TriMesh2D mesh2 = build_tri_mesh_2d(Rect{-4.0, -4.0, 4.0, 4.0}, 0.5);
    const CellPopulation cells2 =
        place_cells_random_2d(15, Rect{-2.0, -2.0, 2.0, 2.0}, 8);
    const auto f2 = load_2d(mesh2, SphSource2d{&cells2, ForceModel{1.0, {}}});
    double sx = 0.0, sy = 0.0, n1 = 0.0;
    for (std::size_t i = 0; i < f2.size(); i += 2) {
      sx += f2[i];
      sy += f2[i + 1];
      n1 += std::abs(f2[i]) + std::abs(f2[i + 1]);
    }
    worst = std::max(worst, std::abs(sx) / n1);
    worst = std::max(worst, std::abs(sy) / n1);
    pass = pass && worst <= 1e-8;
    detail += ", load sums " + fmt(worst);
  }

  // (e) Manufactured 2D solution: order 2 +- 0.3.
  {
    const MaterialParams mat(1.0, 0.3);
    const oracles::ManufacturedCase mms(mat);
    std::vector<double> errors;
    std::vector<TriMesh2D> meshes;
    meshes.push_back(build_tri_mesh_2d(Rect{0.0, 0.0, 1.0, 1.0}, 1.0 / 8.0));
    meshes.push_back(refine(meshes.back()));
    meshes.push_back(refine(meshes.back()));
    for (const TriMesh2D& m : meshes) {
      SparseSystem sys;
      sys.matrix = assemble_stiffness_2d(m, mat);
      sys.rhs =
          oracles::load_from_body(m, [&](Point p) { return mms.body_force(p); });
      apply_dirichlet_2d(sys.matrix, sys.rhs, m);
      const FeSolution2D u = solve_dirichlet_2d(sys, m);
      errors.push_back(oracles::l2_error_against(
          u, [&](Point p) { return mms.displacement(p); }));
    }
    const double rate = std::log2(errors[1] / errors[2]);
    pass = pass && rate >= 1.7 && rate <= 2.3;
    detail += ", mms order " + fmt(rate);
  }

  report(9, "oracle suite", pass, detail, timer.seconds());
}

}  // namespace

int main() {
  criterion_empirical_rule();
  criterion_analytic_consistency();
  criterion_theorem1_desk();
  criterion_rates_1d();
  criterion_random_positions();
  criteria_2d_ladders();
  criterion_cost_asymmetry();
  criterion_oracles();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}

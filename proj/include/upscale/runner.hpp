#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "upscale/analytic1d.hpp"
#include "upscale/cells.hpp"
#include "upscale/config.hpp"
#include "upscale/fem1d.hpp"
#include "upscale/fem2d.hpp"
#include "upscale/metrics.hpp"

namespace upscale {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

// ---------------------------------------------------------------------------
// Solution CSV writers

inline void write_solution_csv(const FeSolution1D& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "x,u\n";
  for (int j = 0; j < u.mesh->n_nodes(); ++j)
    out << format_real(u.mesh->nodes[j]) << ','
        << format_real(u.values[static_cast<std::size_t>(j)]) << '\n';
}

inline void write_solution_csv(const FeSolution2D& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "x,y,ux,uy\n";
  for (int j = 0; j < u.mesh->n_nodes(); ++j)
    out << format_real(u.mesh->nodes[j].x) << ','
        << format_real(u.mesh->nodes[j].y) << ','
        << format_real(u.values[static_cast<std::size_t>(2 * j)]) << ','
        << format_real(u.values[static_cast<std::size_t>(2 * j + 1)]) << '\n';
}

/// Deformed wound boundary, counterclockwise.
inline void write_deformed_boundary_csv(const FeSolution2D& u, Rect wound,
                                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "x,y\n";
  const double step = std::min(u.mesh->dx, u.mesh->dy);
  for (Point p : sample_rect_boundary(wound, step)) {
    const Point q = p + u.eval(p);
    out << format_real(q.x) << ',' << format_real(q.y) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Pipeline resolution

/// Cells plus the density source for one 1D run; the piecewise field (when
/// used) is recounted per mesh, so it is built lazily by the ladder loop.
struct Inputs1D {
  CellPopulation cells;
  std::optional<DensityField1d> analytic;  // from_density only
};

inline DensityField1d density_field_from_spec(const DensitySpec& spec) {
  switch (spec.kind) {
    case DensitySpec::Kind::gaussian1d:
      return Gaussian1d{spec.amplitude, spec.mean, spec.sd};
    case DensitySpec::Kind::sine1d:
      return Sine1d{spec.amplitude, spec.frequency};
    default:
      throw DataError("density_field_from_spec: not a 1D preset");
  }
}

inline Inputs1D resolve_inputs_1d(const RunConfig& cfg) {
  Inputs1D in;
  const Domain1D dom(cfg.length, cfg.a, cfg.b);
  if (cfg.pipeline == Pipeline::from_density) {
    in.analytic = density_field_from_spec(*cfg.density);
    SamplingConfig sampling;
    sampling.bin_length = *cfg.bin_length;
    sampling.placement = cfg.placement;
    sampling.seed = cfg.seed;
    in.cells = sample_cells_1d(*in.analytic, dom, sampling);
  } else {
    const CellSourceSpec& src = *cfg.cells;
    switch (src.kind) {
      case CellSourceSpec::Kind::uniform:
        in.cells = make_uniform_cells_1d(dom.a, dom.b, src.count);
        break;
      case CellSourceSpec::Kind::random:
        in.cells = make_random_cells_1d(dom.a, dom.b, src.count, cfg.seed);
        break;
      case CellSourceSpec::Kind::csv:
        in.cells = read_cells_csv(src.csv_path);
        if (in.cells.dimension != 1)
          throw DataError(src.csv_path + ": expected 1D cells");
        break;
    }
  }
  return in;
}

struct Inputs2D {
  CellPopulation cells;
  std::optional<DensityField2d> analytic;
};

inline Inputs2D resolve_inputs_2d(const RunConfig& cfg) {
  Inputs2D in;
  if (cfg.pipeline == Pipeline::from_density) {
    in.analytic = Gaussian2d{cfg.density->amplitude};
    SamplingConfig sampling;
    sampling.placement = cfg.placement;
    sampling.seed = cfg.seed;
    in.cells = sample_cells_2d(*in.analytic, cfg.omega, sampling);
  } else {
    const CellSourceSpec& src = *cfg.cells;
    switch (src.kind) {
      case CellSourceSpec::Kind::random:
        in.cells = place_cells_random_2d(src.count, cfg.wound, cfg.seed);
        break;
      case CellSourceSpec::Kind::csv:
        in.cells = read_cells_csv(src.csv_path);
        if (in.cells.dimension != 2)
          throw DataError(src.csv_path + ": expected 2D cells");
        break;
      default:
        throw DataError("resolve_inputs_2d: unsupported cell source");
    }
  }
  return in;
}

// ---------------------------------------------------------------------------
// Ladders

struct LadderLevel {
  double h = 0.0;
  double l2_sph = 0.0, h1_sph = 0.0;
  double l2_density = 0.0, h1_density = 0.0;
  double diff_linf = 0.0, diff_l2 = 0.0;
};

struct Ladder1D {
  std::vector<LadderLevel> levels;
  RatePair sph_rates;
  RatePair density_rates;
  // Finest-level payload for reports and file output.
  std::vector<Mesh1D> meshes;
  std::vector<CaseResult1D> results;
};

/// Rates from the last three ladder levels of each norm sequence.
inline void ladder_rates(const std::vector<LadderLevel>& levels,
                         RatePair& sph, RatePair& density) {
  const std::size_t n = levels.size();
  if (n < 3) return;
  const LadderLevel& a = levels[n - 3];
  const LadderLevel& b = levels[n - 2];
  const LadderLevel& c = levels[n - 1];
  sph.l2 = convergence_rate(a.l2_sph, b.l2_sph, c.l2_sph);
  sph.h1 = convergence_rate(a.h1_sph, b.h1_sph, c.h1_sph);
  density.l2 = convergence_rate(a.l2_density, b.l2_density, c.l2_density);
  density.h1 = convergence_rate(a.h1_density, b.h1_density, c.h1_density);
}

/// Nested refinement ladder with fixed cells; the piecewise density is
/// recounted on every level.  Rates use the last three levels, differencing
/// after nodal interpolation onto the finest mesh.
inline Ladder1D run_ladder_1d(const RunConfig& cfg, const Inputs1D& in) {
  Ladder1D ladder;
  ladder.meshes.reserve(static_cast<std::size_t>(cfg.levels));
  ladder.meshes.push_back(build_mesh_1d(cfg.length, cfg.h_target));
  for (int level = 1; level < cfg.levels; ++level)
    ladder.meshes.push_back(refine(ladder.meshes.back()));

  ForceModel force{cfg.force_p, cfg.explicit_width};
  for (const Mesh1D& mesh : ladder.meshes) {
    const DensityField1d density =
        in.analytic ? *in.analytic
                    : DensityField1d{density_from_positions(mesh, in.cells)};
    ladder.results.push_back(run_case_1d(mesh, in.cells, density, force));
    const CaseResult1D& r = ladder.results.back();
    ladder.levels.push_back({mesh.h, norm_l2(r.sph), norm_h1(r.sph),
                             norm_l2(r.density), norm_h1(r.density),
                             diff_linf(r.sph, r.density),
                             diff_l2(r.sph, r.density)});
  }

  if (cfg.levels >= 3) ladder_rates(ladder.levels, ladder.sph_rates,
                                    ladder.density_rates);
  return ladder;
}

struct Ladder2D {
  std::vector<LadderLevel> levels;
  RatePair sph_rates;
  RatePair density_rates;
  std::vector<TriMesh2D> meshes;
  std::vector<CaseResult2D> results;
};

/// Kernel width for level meshes of a 2D refinement study.  The two
/// formulations approach each other only when the width shrinks faster than
/// the elements, so the default h/3 rule is tightened by the refinement
/// factor per level; an explicit width is honored unchanged.
inline double ladder_width_2d(const ForceModel& force, double level_h,
                              double base_h) {
  if (force.explicit_width) return *force.explicit_width;
  return (level_h / 3.0) * (level_h / base_h);
}

inline Ladder2D run_ladder_2d(const RunConfig& cfg, const Inputs2D& in) {
  Ladder2D ladder;
  ladder.meshes.push_back(build_tri_mesh_2d(cfg.omega, cfg.h_target));
  for (int level = 1; level < cfg.levels; ++level)
    ladder.meshes.push_back(refine(ladder.meshes.back()));

  MaterialParams mat(cfg.youngs_modulus, cfg.poisson_ratio);
  const ForceModel base_force{cfg.force_p, cfg.explicit_width};
  const double base_h = ladder.meshes.front().h;
  for (const TriMesh2D& mesh : ladder.meshes) {
    const ForceModel force{
        cfg.force_p, ladder_width_2d(base_force, mesh.h, base_h)};
    const DensityField2d density =
        in.analytic ? *in.analytic
                    : DensityField2d{density_from_positions(mesh, in.cells)};
    ladder.results.push_back(
        run_case_2d(mesh, mat, force, in.cells, density, cfg.threads));
    const CaseResult2D& r = ladder.results.back();
    ladder.levels.push_back({mesh.h, norm_l2(r.sph), norm_h1(r.sph),
                             norm_l2(r.density), norm_h1(r.density),
                             diff_linf(r.sph, r.density),
                             diff_l2(r.sph, r.density)});
  }

  if (cfg.levels >= 3) ladder_rates(ladder.levels, ladder.sph_rates,
                                    ladder.density_rates);
  return ladder;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline std::string ladder_json(const std::vector<LadderLevel>& levels,
                               const RatePair& sph, const RatePair& density) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_real(*v) : std::string("null");
  };
  std::string out = "{\n  \"levels\": [\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const LadderLevel& l = levels[i];
    out += "    { \"h\": " + format_real(l.h) +
           ", \"l2_sph\": " + format_real(l.l2_sph) +
           ", \"h1_sph\": " + format_real(l.h1_sph) +
           ", \"l2_density\": " + format_real(l.l2_density) +
           ", \"h1_density\": " + format_real(l.h1_density) +
           ", \"diff_linf\": " + format_real(l.diff_linf) +
           ", \"diff_l2\": " + format_real(l.diff_l2) + " }";
    out += (i + 1 < levels.size()) ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"rate_l2_sph\": " + opt(sph.l2) + ",\n";
  out += "  \"rate_h1_sph\": " + opt(sph.h1) + ",\n";
  out += "  \"rate_l2_density\": " + opt(density.l2) + ",\n";
  out += "  \"rate_h1_density\": " + opt(density.h1) + "\n";
  out += "}\n";
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << text;
}

inline std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw DataError("cannot create output directory " + dir.string());
  return dir;
}

/// Drops the fields of approaches that were not requested.
inline void mask_approaches(ComparisonReport& rep, Approach approach) {
  if (approach == Approach::sph) {
    rep.density.reset();
    rep.diff_linf.reset();
    rep.diff_l2.reset();
  } else if (approach == Approach::density) {
    rep.sph.reset();
    rep.diff_linf.reset();
    rep.diff_l2.reset();
  }
}

/// Maps exceptions onto the CLI exit-code contract (diagnostics to stderr).
template <class Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace detail

/// Solves the configured case (plus the rate ladder when levels >= 3) and
/// writes solution_{sph,density}.csv, cells.csv, report.json and, in 2D,
/// boundary_deformed_{sph,density}.csv.
inline int cmd_run(const RunConfig& cfg) {
  return detail::guarded([&] {
  const auto dir = detail::prepare_out_dir(cfg);
  const std::string pipeline_name =
      cfg.pipeline == Pipeline::from_positions ? "from_positions"
                                               : "from_density";
  if (cfg.dimension == 1) {
    const Inputs1D in = resolve_inputs_1d(cfg);
    const Ladder1D ladder = run_ladder_1d(cfg, in);
    const CaseResult1D& base = ladder.results.front();
    const Domain1D dom(cfg.length, cfg.a, cfg.b);
    ComparisonReport rep = build_report(
        base, dom,
        RunMetadata{ladder.meshes.front().h, in.cells.size(), cfg.seed,
                    pipeline_name},
        ladder.sph_rates, ladder.density_rates);
    detail::mask_approaches(rep, cfg.approach);
    write_cells_csv(in.cells, (dir / "cells.csv").string());
    if (cfg.approach != Approach::density)
      write_solution_csv(base.sph, (dir / "solution_sph.csv").string());
    if (cfg.approach != Approach::sph)
      write_solution_csv(base.density, (dir / "solution_density.csv").string());
    detail::write_text((dir / "report.json").string(), to_json(rep));
  } else {
    const Inputs2D in = resolve_inputs_2d(cfg);
    const Ladder2D ladder = run_ladder_2d(cfg, in);
    const CaseResult2D& base = ladder.results.front();
    ComparisonReport rep = build_report(
        base, cfg.wound,
        RunMetadata{ladder.meshes.front().h, in.cells.size(), cfg.seed,
                    pipeline_name},
        ladder.sph_rates, ladder.density_rates);
    detail::mask_approaches(rep, cfg.approach);
    write_cells_csv(in.cells, (dir / "cells.csv").string());
    if (cfg.approach != Approach::density) {
      write_solution_csv(base.sph, (dir / "solution_sph.csv").string());
      write_deformed_boundary_csv(
          base.sph, cfg.wound, (dir / "boundary_deformed_sph.csv").string());
    }
    if (cfg.approach != Approach::sph) {
      write_solution_csv(base.density,
                         (dir / "solution_density.csv").string());
      write_deformed_boundary_csv(
          base.density, cfg.wound,
          (dir / "boundary_deformed_density.csv").string());
    }
    detail::write_text((dir / "report.json").string(), to_json(rep));
  }
  return exit_ok;
  });
}

/// Refinement study over `levels` nested meshes with fixed cells; writes
/// ladder.json with per-level norms, inter-approach differences and rates.
inline int cmd_convergence(const RunConfig& cfg) {
  if (cfg.levels < 3) {
    std::cerr << "convergence: levels must be >= 3 (rates need three meshes)\n";
    return exit_validation;
  }
  return detail::guarded([&] {
    const auto dir = detail::prepare_out_dir(cfg);
    std::string json;
    if (cfg.dimension == 1) {
      const Inputs1D in = resolve_inputs_1d(cfg);
      const Ladder1D ladder = run_ladder_1d(cfg, in);
      write_cells_csv(in.cells, (dir / "cells.csv").string());
      json = detail::ladder_json(ladder.levels, ladder.sph_rates,
                                 ladder.density_rates);
    } else {
      const Inputs2D in = resolve_inputs_2d(cfg);
      const Ladder2D ladder = run_ladder_2d(cfg, in);
      write_cells_csv(in.cells, (dir / "cells.csv").string());
      json = detail::ladder_json(ladder.levels, ladder.sph_rates,
                                 ladder.density_rates);
    }
    detail::write_text((dir / "ladder.json").string(), json);
    return exit_ok;
  });
}

/// Samples cells from the configured density and writes cells.csv only.
inline int cmd_sample_cells(const RunConfig& cfg) {
  if (cfg.pipeline != Pipeline::from_density || !cfg.density) {
    std::cerr << "sample-cells: needs pipeline = from_density and a density\n";
    return exit_validation;
  }
  return detail::guarded([&] {
    const auto dir = detail::prepare_out_dir(cfg);
    const CellPopulation cells = cfg.dimension == 1
                                     ? resolve_inputs_1d(cfg).cells
                                     : resolve_inputs_2d(cfg).cells;
    write_cells_csv(cells, (dir / "cells.csv").string());
    return exit_ok;
  });
}

}  // namespace upscale

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "upscale/cells.hpp"
#include "upscale/common.hpp"

namespace upscale {

enum class Approach { both, sph, density };
enum class Pipeline { from_positions, from_density };

struct DensitySpec {
  enum class Kind { gaussian1d, sine1d, gaussian2d };
  Kind kind = Kind::gaussian1d;
  double amplitude = 0.0;
  double mean = 0.0;       // gaussian1d
  double sd = 1.0;         // gaussian1d
  double frequency = 1.0;  // sine1d

  bool operator==(const DensitySpec&) const = default;
};

struct CellSourceSpec {
  enum class Kind { uniform, random, csv };
  Kind kind = Kind::uniform;
  int count = 0;
  std::string csv_path;

  bool operator==(const CellSourceSpec&) const = default;
};

/// One batch run, as read from a flat `key = value` config file.
struct RunConfig {
  int dimension = 0;
  // 1D domain
  double length = 0.0;
  double a = 0.0;
  double b = 0.0;
  // 2D domain
  Rect omega{-10.0, -10.0, 10.0, 10.0};
  Rect wound{-5.0, -5.0, 5.0, 5.0};

  Approach approach = Approach::both;
  Pipeline pipeline = Pipeline::from_positions;
  std::optional<DensitySpec> density;
  std::optional<CellSourceSpec> cells;
  std::optional<double> bin_length;  // d, 1D density pipeline only
  Placement placement = Placement::equispaced;

  double h_target = 0.0;
  double force_p = 1.0;
  std::optional<double> explicit_width;  // empty => width = h/3
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.3;
  int levels = 3;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

struct ConfigError {
  int line = 0;
  std::string key;
  std::string message;
};

struct ParseResult {
  std::optional<RunConfig> config;  // set only when errors is empty
  std::vector<ConfigError> errors;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(s)};
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

inline bool parse_int(const std::string& tok, int& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline bool parse_u64(const std::string& tok, std::uint64_t& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace detail

/// Parses flat `key = value` text (one pair per line, `#` starts a comment).
/// All validation problems are collected, each with its key and line number;
/// the config is returned only when the list is empty.
inline ParseResult parse_config(std::string_view text) {
  ParseResult result;
  RunConfig cfg;
  std::map<std::string, int> seen;  // key -> line
  auto fail = [&](int line, const std::string& key, std::string msg) {
    result.errors.push_back({line, key, std::move(msg)});
  };

  // Parsed raw values, validated once the whole file is read.
  bool has_dimension = false, has_length = false, has_a = false, has_b = false;
  bool has_h = false, has_omega = false, has_wound = false, has_d = false;
  bool has_placement = false;
  int line_no = 0;
  std::istringstream stream{std::string(text)};
  std::string raw;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line{raw};
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, std::string(line), "expected 'key = value'");
      continue;
    }
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string value{detail::trim(line.substr(eq + 1))};
    if (key.empty() || value.empty()) {
      fail(line_no, key, "expected 'key = value'");
      continue;
    }
    if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
      fail(line_no, key,
           "duplicate key (first on line " + std::to_string(it->second) + ")");
      continue;
    }
    const auto tokens = detail::split_tokens(value);

    auto one_double = [&](double& out) {
      if (tokens.size() != 1 || !detail::parse_double(tokens[0], out)) {
        fail(line_no, key, "expected one finite real, got '" + value + "'");
        return false;
      }
      return true;
    };
    auto one_rect = [&](Rect& out) {
      double v[4];
      if (tokens.size() != 4 || !detail::parse_double(tokens[0], v[0]) ||
          !detail::parse_double(tokens[1], v[1]) ||
          !detail::parse_double(tokens[2], v[2]) ||
          !detail::parse_double(tokens[3], v[3])) {
        fail(line_no, key, "expected 'xmin ymin xmax ymax'");
        return false;
      }
      out = Rect{v[0], v[1], v[2], v[3]};
      if (!(out.width() > 0.0 && out.height() > 0.0)) {
        fail(line_no, key, "rectangle has nonpositive extent");
        return false;
      }
      return true;
    };

    if (key == "dimension") {
      int d = 0;
      if (tokens.size() != 1 || !detail::parse_int(tokens[0], d) ||
          (d != 1 && d != 2))
        fail(line_no, key, "must be 1 or 2");
      else {
        cfg.dimension = d;
        has_dimension = true;
      }
    } else if (key == "L") {
      has_length = one_double(cfg.length);
      if (has_length && !(cfg.length > 0.0))
        fail(line_no, key, "domain length must be > 0");
    } else if (key == "a") {
      has_a = one_double(cfg.a);
    } else if (key == "b") {
      has_b = one_double(cfg.b);
    } else if (key == "omega") {
      has_omega = one_rect(cfg.omega);
    } else if (key == "wound") {
      has_wound = one_rect(cfg.wound);
    } else if (key == "approach") {
      if (value == "both")
        cfg.approach = Approach::both;
      else if (value == "sph")
        cfg.approach = Approach::sph;
      else if (value == "density")
        cfg.approach = Approach::density;
      else
        fail(line_no, key, "must be both, sph or density");
    } else if (key == "pipeline") {
      if (value == "from_positions")
        cfg.pipeline = Pipeline::from_positions;
      else if (value == "from_density")
        cfg.pipeline = Pipeline::from_density;
      else
        fail(line_no, key, "must be from_positions or from_density");
    } else if (key == "density") {
      DensitySpec spec;
      bool ok = !tokens.empty();
      if (ok && tokens[0] == "gaussian1d" && tokens.size() == 4) {
        spec.kind = DensitySpec::Kind::gaussian1d;
        ok = detail::parse_double(tokens[1], spec.amplitude) &&
             detail::parse_double(tokens[2], spec.mean) &&
             detail::parse_double(tokens[3], spec.sd) && spec.sd > 0.0 &&
             spec.amplitude >= 0.0;
      } else if (ok && tokens[0] == "sine1d" && tokens.size() == 3) {
        spec.kind = DensitySpec::Kind::sine1d;
        ok = detail::parse_double(tokens[1], spec.amplitude) &&
             detail::parse_double(tokens[2], spec.frequency) &&
             spec.amplitude >= 0.0;
      } else if (ok && tokens[0] == "gaussian2d" && tokens.size() == 2) {
        spec.kind = DensitySpec::Kind::gaussian2d;
        ok = detail::parse_double(tokens[1], spec.amplitude) &&
             spec.amplitude >= 0.0;
      } else {
        ok = false;
      }
      if (!ok)
        fail(line_no, key,
             "expected 'gaussian1d AMP MEAN SD' (SD > 0), 'sine1d AMP FREQ' "
             "or 'gaussian2d AMP' with AMP >= 0");
      else
        cfg.density = spec;
    } else if (key == "cells") {
      CellSourceSpec spec;
      bool ok = tokens.size() == 2;
      if (ok && tokens[0] == "uniform") {
        spec.kind = CellSourceSpec::Kind::uniform;
        ok = detail::parse_int(tokens[1], spec.count) && spec.count >= 0;
      } else if (ok && tokens[0] == "random") {
        spec.kind = CellSourceSpec::Kind::random;
        ok = detail::parse_int(tokens[1], spec.count) && spec.count >= 0;
      } else if (ok && tokens[0] == "csv") {
        spec.kind = CellSourceSpec::Kind::csv;
        spec.csv_path = tokens[1];
      } else {
        ok = false;
      }
      if (!ok)
        fail(line_no, key,
             "expected 'uniform N', 'random N' (N >= 0) or 'csv PATH'");
      else
        cfg.cells = spec;
    } else if (key == "d") {
      double d = 0.0;
      if (one_double(d)) {
        if (!(d > 0.0))
          fail(line_no, key, "bin length must be > 0");
        else {
          cfg.bin_length = d;
          has_d = true;
        }
      }
    } else if (key == "placement") {
      has_placement = true;
      if (value == "equispaced")
        cfg.placement = Placement::equispaced;
      else if (value == "random")
        cfg.placement = Placement::seeded_random;
      else
        fail(line_no, key, "must be equispaced or random");
    } else if (key == "h_target") {
      has_h = one_double(cfg.h_target);
      if (has_h && !(cfg.h_target > 0.0))
        fail(line_no, key, "mesh size target must be > 0");
    } else if (key == "P") {
      one_double(cfg.force_p);
    } else if (key == "width") {
      if (value == "mesh_third")
        cfg.explicit_width.reset();
      else if (tokens.size() == 2 && tokens[0] == "explicit") {
        double w = 0.0;
        if (!detail::parse_double(tokens[1], w) || !(w > 0.0))
          fail(line_no, key, "explicit width must be a real > 0");
        else
          cfg.explicit_width = w;
      } else
        fail(line_no, key, "must be mesh_third or 'explicit EPS'");
    } else if (key == "E") {
      double e = 0.0;
      if (one_double(e)) {
        if (!(e > 0.0))
          fail(line_no, key, "Young's modulus must be > 0");
        else
          cfg.youngs_modulus = e;
      }
    } else if (key == "nu") {
      double nu = 0.0;
      if (one_double(nu)) {
        if (!(nu >= 0.0 && nu < 0.5))
          fail(line_no, key,
               "Poisson ratio must lie in (0, 0.5); 0.5 itself is excluded");
        else
          cfg.poisson_ratio = nu;
      }
    } else if (key == "levels") {
      if (tokens.size() != 1 || !detail::parse_int(tokens[0], cfg.levels) ||
          cfg.levels < 1)
        fail(line_no, key, "must be an integer >= 1");
    } else if (key == "seed") {
      if (tokens.size() != 1 || !detail::parse_u64(tokens[0], cfg.seed))
        fail(line_no, key, "must be an unsigned 64-bit integer");
    } else if (key == "threads") {
      if (tokens.size() != 1 || !detail::parse_int(tokens[0], cfg.threads) ||
          cfg.threads < 1)
        fail(line_no, key, "must be an integer >= 1");
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      fail(line_no, key, "unknown key");
    }
  }

  auto line_of = [&](const char* key) {
    auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };

  if (!has_dimension) {
    fail(0, "dimension", "required key missing");
  } else if (cfg.dimension == 1) {
    if (!has_length) fail(0, "L", "required for dimension 1");
    if (!has_a) fail(0, "a", "required for dimension 1");
    if (!has_b) fail(0, "b", "required for dimension 1");
    if (has_length && has_a && has_b &&
        !(0.0 < cfg.a && cfg.a < cfg.b && cfg.b < cfg.length))
      fail(line_of("b"), "b", "need 0 < a < b < L");
    if (has_h && has_length && !(cfg.h_target < cfg.length))
      fail(line_of("h_target"), "h_target", "must be < L");
    if (has_omega) fail(line_of("omega"), "omega", "only valid in dimension 2");
    if (has_wound) fail(line_of("wound"), "wound", "only valid in dimension 2");
  } else if (cfg.dimension == 2) {
    if (has_length) fail(line_of("L"), "L", "only valid in dimension 1");
    if (has_a) fail(line_of("a"), "a", "only valid in dimension 1");
    if (has_b) fail(line_of("b"), "b", "only valid in dimension 1");
    if (!(cfg.wound.xmin >= cfg.omega.xmin && cfg.wound.xmax <= cfg.omega.xmax &&
          cfg.wound.ymin >= cfg.omega.ymin && cfg.wound.ymax <= cfg.omega.ymax))
      fail(line_of("wound"), "wound", "must lie inside omega");
    if (has_h &&
        !(cfg.h_target < std::min(cfg.omega.width(), cfg.omega.height())))
      fail(line_of("h_target"), "h_target", "must be < the smaller omega side");
    if (has_d) fail(line_of("d"), "d", "2D sampling always uses 1x1 squares");
  }
  if (!has_h) fail(0, "h_target", "required key missing");
  if (line_of("pipeline") == 0) fail(0, "pipeline", "required key missing");

  if (cfg.pipeline == Pipeline::from_density) {
    if (!cfg.density) fail(0, "density", "required for pipeline from_density");
    if (cfg.cells)
      fail(line_of("cells"), "cells",
           "not allowed with pipeline from_density (cells are sampled)");
    if (cfg.dimension == 1 && !has_d)
      fail(0, "d", "bin length required for the 1D density pipeline");
    if (cfg.dimension == 1 && has_d && has_length &&
        !(*cfg.bin_length <= cfg.length))
      fail(line_of("d"), "d", "bin length must be <= L");
    if (cfg.density) {
      const bool wants_1d = cfg.density->kind != DensitySpec::Kind::gaussian2d;
      if (cfg.dimension == 1 && !wants_1d)
        fail(line_of("density"), "density", "gaussian2d needs dimension 2");
      if (cfg.dimension == 2 && wants_1d)
        fail(line_of("density"), "density",
             "1D presets need dimension 1 (use gaussian2d)");
    }
  } else {
    if (!cfg.cells) fail(0, "cells", "required for pipeline from_positions");
    if (cfg.density)
      fail(line_of("density"), "density",
           "not allowed with pipeline from_positions (density is counted)");
    if (has_d) fail(line_of("d"), "d", "only used by the density pipeline");
    if (has_placement)
      fail(line_of("placement"), "placement",
           "only used by the density pipeline");
    if (cfg.cells && cfg.dimension == 2 &&
        cfg.cells->kind == CellSourceSpec::Kind::uniform)
      fail(line_of("cells"), "cells",
           "uniform cells are 1D; use random or csv in dimension 2");
  }

  if (result.errors.empty()) result.config = cfg;
  return result;
}

/// Canonical text form; parse_config(to_text(cfg)) reproduces the config.
inline std::string to_text(const RunConfig& cfg) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  kv("dimension", std::to_string(cfg.dimension));
  if (cfg.dimension == 1) {
    kv("L", format_real(cfg.length));
    kv("a", format_real(cfg.a));
    kv("b", format_real(cfg.b));
  } else {
    kv("omega", format_real(cfg.omega.xmin) + ' ' + format_real(cfg.omega.ymin) +
                    ' ' + format_real(cfg.omega.xmax) + ' ' +
                    format_real(cfg.omega.ymax));
    kv("wound", format_real(cfg.wound.xmin) + ' ' + format_real(cfg.wound.ymin) +
                    ' ' + format_real(cfg.wound.xmax) + ' ' +
                    format_real(cfg.wound.ymax));
  }
  kv("approach", cfg.approach == Approach::both
                     ? "both"
                     : cfg.approach == Approach::sph ? "sph" : "density");
  kv("pipeline", cfg.pipeline == Pipeline::from_positions ? "from_positions"
                                                          : "from_density");
  if (cfg.density) {
    const DensitySpec& d = *cfg.density;
    switch (d.kind) {
      case DensitySpec::Kind::gaussian1d:
        kv("density", "gaussian1d " + format_real(d.amplitude) + ' ' +
                          format_real(d.mean) + ' ' + format_real(d.sd));
        break;
      case DensitySpec::Kind::sine1d:
        kv("density",
           "sine1d " + format_real(d.amplitude) + ' ' + format_real(d.frequency));
        break;
      case DensitySpec::Kind::gaussian2d:
        kv("density", "gaussian2d " + format_real(d.amplitude));
        break;
    }
    if (cfg.placement == Placement::seeded_random) kv("placement", "random");
  }
  if (cfg.cells) {
    switch (cfg.cells->kind) {
      case CellSourceSpec::Kind::uniform:
        kv("cells", "uniform " + std::to_string(cfg.cells->count));
        break;
      case CellSourceSpec::Kind::random:
        kv("cells", "random " + std::to_string(cfg.cells->count));
        break;
      case CellSourceSpec::Kind::csv:
        kv("cells", "csv " + cfg.cells->csv_path);
        break;
    }
  }
  if (cfg.bin_length) kv("d", format_real(*cfg.bin_length));
  kv("h_target", format_real(cfg.h_target));
  kv("P", format_real(cfg.force_p));
  if (cfg.explicit_width)
    kv("width", "explicit " + format_real(*cfg.explicit_width));
  kv("E", format_real(cfg.youngs_modulus));
  kv("nu", format_real(cfg.poisson_ratio));
  kv("levels", std::to_string(cfg.levels));
  kv("seed", std::to_string(cfg.seed));
  kv("threads", std::to_string(cfg.threads));
  kv("out", cfg.out_dir);
  return out;
}

}  // namespace upscale

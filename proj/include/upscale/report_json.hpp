#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "upscale/metrics.hpp"

namespace upscale {

namespace detail {

inline std::optional<double> optional_number(const nlohmann::json& j,
                                             const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

inline std::optional<ApproachReport> parse_approach(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  ApproachReport a;
  a.l2_norm = j.at("l2_norm").get<double>();
  a.h1_norm = j.at("h1_norm").get<double>();
  a.rate_l2 = optional_number(j, "rate_l2");
  a.rate_h1 = optional_number(j, "rate_h1");
  a.reduction_ratio_percent = j.at("reduction_ratio_percent").get<double>();
  a.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return a;
}

}  // namespace detail

/// Inverse of to_json(ComparisonReport); throws DataError on schema defects.
inline ComparisonReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report_from_json: ") + e.what());
  }
  try {
    ComparisonReport rep;
    rep.sph = detail::parse_approach(j.at("sph"));
    rep.density = detail::parse_approach(j.at("density"));
    rep.diff_linf = detail::optional_number(j, "diff_linf");
    rep.diff_l2 = detail::optional_number(j, "diff_l2");
    rep.h = j.at("h").get<double>();
    rep.n_cells = j.at("N_s").get<long>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.pipeline = j.at("pipeline").get<std::string>();
    rep.validate();
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report_from_json: ") + e.what());
  }
}

}  // namespace upscale

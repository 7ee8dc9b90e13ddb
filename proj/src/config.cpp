#include "obstacle/config.hpp"

#include "obstacle/errors.hpp"

#include <cmath>

namespace obstacle {

const char* to_string(Scheme scheme) {
  return scheme == Scheme::Explicit ? "explicit" : "semi-implicit";
}

const char* to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::Bump: return "bump";
    case InitialKind::TwoBump: return "two-bump";
    case InitialKind::Constant: return "constant";
    case InitialKind::File: return "file";
  }
  return "?";
}

StressLaw LawSpec::build() const {
  switch (kind) {
    case LawKind::Linear: return StressLaw::linear();
    case LawKind::Power: return StressLaw::power(exponent);
    case LawKind::Table: return StressLaw::table_from_file(table_path);
  }
  return StressLaw::linear();
}

namespace {

void positive(double value, const char* key) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ConfigError(std::string(key) + " must be positive and finite", key);
}

}  // namespace

void SimConfig::validate() const {
  positive(half_width, "half_width");
  if (cells < 16 || cells % 2 != 0) throw ConfigError("cells must be even and at least 16", "cells");
  positive(horizon, "horizon");
  positive(epsilon, "epsilon");
  if (epsilon_visc) positive(*epsilon_visc, "epsilon_visc");
  if (epsilon_pen) positive(*epsilon_pen, "epsilon_pen");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)", "cfl");
  if (record_stride < 1) throw ConfigError("record_stride must be at least 1", "record_stride");
  if (law.kind == LawKind::Power && (law.exponent < 3 || law.exponent % 2 == 0))
    throw ConfigError("exponent must be an odd integer >= 3", "exponent");
  if (law.kind == LawKind::Table && law.table_path.empty())
    throw ConfigError("a table law needs a table path", "table");

  const auto bump = [](const BumpSpec& b, const char* suffix) {
    if (!(b.width > 0.0) || !std::isfinite(b.width))
      throw ConfigError(std::string("width") + suffix + " must be positive", std::string("width") + suffix);
    if (!std::isfinite(b.amplitude) || !std::isfinite(b.center) || !std::isfinite(b.velocity))
      throw ConfigError(std::string("bump") + suffix + " parameters must be finite", std::string("center") + suffix);
  };
  bump(initial.first, "");
  if (initial.kind == InitialKind::TwoBump) bump(initial.second, "2");
  if (!std::isfinite(initial.offset)) throw ConfigError("offset must be finite", "offset");
  if (!(initial.mollify_cells >= 0.0)) throw ConfigError("mollify_cells must be >= 0", "mollify_cells");
  if (initial.kind == InitialKind::File && initial.file.empty())
    throw ConfigError("initial kind 'file' needs a file path", "file");
  if (mode == ObstacleMode::One && initial.offset < 0.0)
    throw ConfigError("far-field value must be admissible (>= 0) for one obstacle", "offset");
  if (mode == ObstacleMode::Two && std::abs(initial.offset) > 1.0)
    throw ConfigError("far-field value must lie in [-1, 1] for two obstacles", "offset");

  const auto& d = diagnostics;
  if (!(d.window_lo < d.window_hi)) throw ConfigError("window_lo must be below window_hi", "window_lo");
  if (d.window_lo < -half_width || d.window_hi > half_width)
    throw ConfigError("diagnostic window must lie inside the grid", "window_hi");
  if (!(d.holder_alpha > 0.0 && d.holder_alpha < 0.5))
    throw ConfigError("holder_alpha must lie in (0, 1/2)", "holder_alpha");
  if (d.test_count < 1) throw ConfigError("test_count must be at least 1", "test_count");
  for (double e : d.sweep_eps) positive(e, "sweep_eps");
  for (std::size_t n : d.refine_cells)
    if (n < 16 || n % 2 != 0) throw ConfigError("refine_cells entries must be even and >= 16", "refine_cells");
  positive(d.energy_tolerance, "energy_tolerance");
}

}  // namespace obstacle

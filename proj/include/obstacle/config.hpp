/**
 * @file config.hpp
 * @brief Simulation configuration: grid, horizon, penalty/viscosity parameters,
 *        stress law selection, stepping policy, initial data and diagnostics
 *        settings.
 */
#pragma once

#include "obstacle/penalty.hpp"
#include "obstacle/stress_law.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace obstacle {

enum class Scheme { Explicit, SemiImplicitPenalty };

const char* to_string(Scheme scheme);

struct LawSpec {
  LawKind kind = LawKind::Linear;
  int exponent = 3;        ///< power law only
  std::string table_path;  ///< table law only

  StressLaw build() const;
  bool operator==(const LawSpec&) const = default;
};

/// One compactly supported bump b((x - center) / width), b(s) = (1 - s^2)^3 on |s| < 1,
/// contributing `amplitude` to u0 and `velocity` to v0.
struct BumpSpec {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double velocity = 0.0;
  bool operator==(const BumpSpec&) const = default;
};

enum class InitialKind { Bump, TwoBump, Constant, File };

const char* to_string(InitialKind kind);

struct InitialSpec {
  InitialKind kind = InitialKind::Bump;
  double offset = 0.0;  ///< far-field value of u0
  BumpSpec first;
  BumpSpec second;      ///< two-bump only
  std::string file;     ///< snapshot supplying u0 and v0 (file only)
  /// Mollifier half-width in cells; 0 disables smoothing. File data is never mollified.
  double mollify_cells = 4.0;
  bool operator==(const InitialSpec&) const = default;
};

struct DiagnosticsSpec {
  double window_lo = -2.0;   ///< compact window K
  double window_hi = 2.0;
  double holder_alpha = 0.4;
  std::size_t test_count = 20;
  unsigned seed = 20240611u;
  std::vector<double> sweep_eps{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<std::size_t> refine_cells{512, 1024, 2048};
  double energy_tolerance = 1e-3;
  bool operator==(const DiagnosticsSpec&) const = default;
};

struct SimConfig {
  double half_width = 8.0;   ///< R, the grid covers [-R, R)
  std::size_t cells = 1024;  ///< n
  double horizon = 1.0;      ///< T
  double epsilon = 1e-2;
  std::optional<double> epsilon_visc;  ///< decoupled viscosity, defaults to epsilon
  std::optional<double> epsilon_pen;   ///< decoupled penalty, defaults to epsilon
  ObstacleMode mode = ObstacleMode::One;
  LawSpec law;
  Scheme scheme = Scheme::Explicit;
  double cfl = 0.5;  ///< theta
  std::size_t record_stride = 1;
  InitialSpec initial;
  DiagnosticsSpec diagnostics;

  double eps_visc() const { return epsilon_visc.value_or(epsilon); }
  double eps_pen() const { return epsilon_pen.value_or(epsilon); }
  bool decoupled() const { return epsilon_visc.has_value() || epsilon_pen.has_value(); }

  /// Throws ConfigError naming the key of the first violated constraint.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

}  // namespace obstacle

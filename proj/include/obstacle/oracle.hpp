/**
 * @file oracle.hpp
 * @brief Reference solutions used to validate the solver and diagnostics.
 *
 * Nothing here shares code with the solver: the free-wave solution is the
 * d'Alembert formula evaluated with adaptive quadrature, and integrals are
 * brute-force composite Simpson sums.
 */
#pragma once

#include "obstacle/penalty.hpp"

#include <functional>
#include <optional>

namespace obstacle::oracle {

/// Initial data for the linear string (wave speed 1). `support_lo/hi` bound the
/// region where u0 differs from `far_field` or v0 is nonzero.
struct FreeWaveSpec {
  std::function<double(double)> u0;
  std::function<double(double)> v0;
  double support_lo = -1.0;
  double support_hi = 1.0;
  double far_field = 0.0;
};

/// u(x,t) = (u0(x-t) + u0(x+t))/2 + (1/2) int_{x-t}^{x+t} v0(s) ds.
double dalembert(const FreeWaveSpec& spec, double x, double t);

/// Earliest t in [0, horizon] (to 1e-6) at which the free solution leaves the
/// admissible set, or nullopt when it stays admissible up to the horizon.
std::optional<double> first_contact_time(const FreeWaveSpec& spec, ObstacleMode mode, double horizon);

/// Composite Simpson rule with `panels` (even) panels; default 10^6.
double brute_quadrature(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels = 1000000);

}  // namespace obstacle::oracle

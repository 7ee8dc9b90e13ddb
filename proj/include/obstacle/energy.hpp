#pragma once

#include "obstacle/grid.hpp"
#include "obstacle/penalty.hpp"
#include "obstacle/stress_law.hpp"

namespace obstacle {

/// Energy components at one recorded time. Dissipation is the cumulative
/// eps * int_0^t int (v_x)^2 supplied by the run loop.
struct EnergyLedger {
  double time = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double penalty = 0.0;
  double dissipation = 0.0;

  double total() const { return kinetic + elastic + penalty; }
};

/// Periodic trapezoidal quadrature of v^2/2, Sigma(w) and Phi_eps(u).
EnergyLedger energy_ledger(const State& state, double dx, const StressLaw& law, double eps_pen,
                           ObstacleMode mode, double dissipation = 0.0);

}  // namespace obstacle

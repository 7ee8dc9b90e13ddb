/**
 * @file solver.hpp
 * @brief Finite-difference solver for the penalised, viscosity-regularised
 *        string on a periodic grid.
 *
 * The unknowns (w, v) evolve by the first-order system
 * @f{align*}{
 *   w_t &= D_0 v, \\
 *   v_t &= D_0 \sigma(w) - F_\varepsilon(u) + \varepsilon D_+ D_- v,
 * @f}
 * and u is carried along by u_t = v with the same velocity used for w, so
 * w = D_0 u holds to roundoff. D_0 is the centered difference and
 * D_+ D_- the 3-point Laplacian, both periodic.
 *
 * Discrete energy: with E = sum dx (v^2/2 + Sigma(w) + Phi(u)) the
 * semi-discrete system satisfies dE/dt = -eps sum dx (D_+ v)^2 exactly,
 * so that is the dissipation the run loop accumulates.
 */
#pragma once

#include "obstacle/config.hpp"
#include "obstacle/energy.hpp"
#include "obstacle/grid.hpp"

#include <cstddef>
#include <vector>

namespace obstacle {

struct Trajectory {
  SimConfig config;
  std::vector<State> records;
  std::vector<double> dissipation;  ///< cumulative viscous dissipation at each record
  std::vector<EnergyLedger> energy;
  std::size_t steps = 0;
  double max_wave_speed = 0.0;

  Grid grid() const { return Grid{config.half_width, config.cells}; }
};

/// What one step changed besides the fields.
struct StepIncrement {
  double dissipation = 0.0;  ///< dt * eps * sum dx (D_+ v)^2 at the stage velocity
  double momentum = 0.0;     ///< change of sum dx v
};

class Solver {
public:
  explicit Solver(SimConfig config);

  const SimConfig& config() const { return config_; }
  const StressLaw& law() const { return law_; }
  Grid grid() const { return grid_; }

  /// Samples, mollifies and projects the initial data; w = D_0 u0, v = v0, t = 0.
  State initialize() const;

  /// Largest characteristic speed sqrt(sigma'(w)) over the grid.
  double wave_speed(const State& state) const;

  /// theta * min(dx / c_max, dx^2 / (2 eps_visc), eps_pen); the penalty bound is
  /// dropped for the semi-implicit scheme.
  double compute_dt(const State& state) const;

  /// Advances `state` in place by dt. Throws BlowUpError (carrying `step_index`)
  /// if a non-finite value appears.
  StepIncrement step(State& state, double dt, std::size_t step_index = 0);

  /// Runs to the horizon, recording every `record_stride` steps and at T.
  Trajectory run();

private:
  void acceleration(const std::vector<double>& u, const std::vector<double>& w,
                    const std::vector<double>& v, bool with_penalty, std::vector<double>& out);
  StepIncrement step_explicit(State& s, double dt);
  StepIncrement step_semi_implicit(State& s, double dt);

  SimConfig config_;
  StressLaw law_;
  Grid grid_;
  std::vector<double> stress_, acc_, uh_, wh_, vh_;
};

/// Free-function forms.
State initialize(const SimConfig& config);
double compute_dt(const State& state, const SimConfig& config);
State step(const State& state, const SimConfig& config, double dt);
Trajectory run(const SimConfig& config);

/// Samples the initial descriptor on the grid before mollification.
void sample_initial(const SimConfig& config, std::vector<double>& u0, std::vector<double>& v0);

/// The compactly supported polynomial bump (1 - s^2)^3 on |s| < 1.
double bump_profile(double s);

}  // namespace obstacle

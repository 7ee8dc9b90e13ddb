/**
 * @file harness.hpp
 * @brief Epsilon sweeps and grid-refinement studies.
 *
 * Sweep members run concurrently and are compared on a shared lattice: the
 * nodes of the window K times a uniform set of times in [0, T], with records
 * interpolated linearly in time.
 */
#pragma once

#include "obstacle/diagnostics.hpp"
#include "obstacle/solver.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace obstacle {

/// Least-squares fit of log y = slope * log x + intercept.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};
RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Per-epsilon summary of one sweep member.
struct SweepMember {
  double epsilon = 0.0;
  double eps_visc = 0.0;
  double eps_pen = 0.0;
  std::size_t steps = 0;
  double initial_energy = 0.0;
  double energy_residual_max = 0.0;
  double penalty_potential_max = 0.0;
  double violation_l2 = 0.0;          ///< space-time L2 norm of the constraint excess
  double violation_max_spatial = 0.0; ///< max over records of the spatial L2 norm
  double violation_linf = 0.0;
  double penalty_l1 = 0.0;            ///< on K up to T
  double defect = 0.0;                ///< defect-measure proxy with the cutoff of K
  SerreShearer serre_shearer;
  double holder_max = 0.0;            ///< max over records of the Hoelder modulus on K
  double velocity_norm = 0.0;         ///< ||v||_{L2(K x [0,T])}
  std::size_t entropy_tests = 0;
  double entropy_min_relative = 0.0;  ///< min over tests of value / ||test||
  double variational_min_relative = 0.0;  ///< min over comparisons of value / scale
  double variational_floor = 0.0;     ///< max(0, -variational_min_relative)
  double localization = 0.0;          ///< active-set share of the residual for the first comparison
  DiagnosticsReport report;
};

/// Differences between consecutive sweep members on the shared lattice.
struct PairwiseDifference {
  double eps_coarse = 0.0;
  double eps_fine = 0.0;
  double u_l2 = 0.0;       ///< ||u_a - u_b||_{L2(K x [0,T])}
  double u_sup = 0.0;      ///< max over the lattice of |u_a - u_b|
  double v_l2 = 0.0;
  double velocity_gap = 0.0;  ///< | ||v_a|| - ||v_b|| |
};

struct SweepReport {
  SimConfig base;
  std::vector<double> eps;
  std::vector<SweepMember> members;
  std::vector<PairwiseDifference> pairs;
  RateFit violation_rate;  ///< violation_l2 against epsilon
  RateFit u_l2_rate;       ///< pairwise u_l2 against the coarser epsilon
  RateFit u_sup_rate;
};

struct SweepOptions {
  std::size_t lattice_times = 201;
  bool parallel = true;
};

/// Copy of `base` with the coupling parameter set to `eps`; decoupled
/// viscosity and penalty values are scaled by eps / base.epsilon.
SimConfig with_epsilon(const SimConfig& base, double eps);

/// Requires a strictly decreasing list of at least three values. A failing
/// member aborts the sweep with an error naming its epsilon.
SweepReport eps_sweep(const SimConfig& base, const std::vector<double>& eps_list, const SweepOptions& options = {});

struct RefinementReport {
  SimConfig base;
  std::vector<std::size_t> cells;
  std::vector<double> u_self;  ///< ||u_n - u_2n||_{L2} at T, on the coarse nodes
  std::vector<double> v_self;
  std::vector<double> u_self_orders;
  std::vector<double> v_self_orders;
  bool has_exact = false;           ///< linear law, no contact before T
  std::vector<double> exact_linf;   ///< max |u_n - u_exact| at T
  std::vector<double> exact_orders;
  RateFit exact_fit;                ///< exact_linf against dx
};

/// Requires a doubling list of at least three grids.
RefinementReport refinement_study(const SimConfig& base, const std::vector<std::size_t>& n_list);

/// L-infinity error at the final record of a linear-law trajectory against the
/// d'Alembert solution of its (unmollified) initial descriptor.
double dalembert_error(const Trajectory& traj);

std::string sweep_csv(const SweepReport& report, const std::string& effective_config);
std::string refinement_csv(const RefinementReport& report, const std::string& effective_config);

}  // namespace obstacle

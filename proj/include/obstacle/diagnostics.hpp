/**
 * @file diagnostics.hpp
 * @brief Functionals of a recorded trajectory: energy balance, penalty and
 *        constraint norms, entropy and variational residuals, the defect
 *        measure proxy, Serre-Shearer type bounds and Hoelder moduli.
 *
 * Space-time integrals use the periodic trapezoidal rule in x (or the
 * trapezoidal rule on the nodes of a window K) and the trapezoidal rule over
 * the record times in t.
 */
#pragma once

#include "obstacle/energy.hpp"
#include "obstacle/solver.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace obstacle {

struct Window {
  double lo = -2.0;
  double hi = 2.0;
};

/**
 * @brief Tensor-product test function b((x - x0)/rx) * b((t - t0)/rt) with
 *        b(s) = (1 - s^2)^3 on |s| < 1. A spatial cutoff sets `spatial_only`
 *        and ignores the time factor.
 */
struct TestFunction {
  double x0 = 0.0;
  double rx = 1.0;
  double t0 = 0.0;
  double rt = 1.0;
  bool spatial_only = false;

  static TestFunction cutoff(double x0, double rx);
  static TestFunction space_time(double x0, double rx, double t0, double rt);

  double value(double x, double t) const;
  double d_dx(double x, double t) const;
  double d_dt(double x, double t) const;
};

/// Comparison function zeta = P(tau(t) * (u + beta * bump)), with P the
/// projection onto the admissible set and tau a fade to 0 over [T - fade, T].
struct ComparisonSpec {
  double beta = 0.0;
  TestFunction bump;
  double fade = 0.1;
};

/// Values of a comparison function on the record lattice: zeta[m][i].
using LatticeField = std::vector<std::vector<double>>;

// ---------------------------------------------------------------------------

/// |E(t) + dissipation(t) - E(0)| / max(E(0), 1e-30) per record.
std::vector<double> energy_balance_residual(const Trajectory& traj);

/// (1/eps) int_0^t int_K excess(u) dx dtau, excess = u^- or (u-1)^+ + (u+1)^-.
double penalty_l1(const Trajectory& traj, Window window, double horizon);
/// The same integral assembled from |F_eps(u)| directly.
double penalty_l1_from_force(const Trajectory& traj, Window window, double horizon);

struct ViolationNorms {
  double l2_space_time = 0.0;   ///< (int_0^T int excess^2)^{1/2}
  double linf = 0.0;            ///< max excess
  double max_spatial_l2 = 0.0;  ///< max over records of ||excess||_{L2}
};
ViolationNorms constraint_violation(const Trajectory& traj);

/// (eta, H) = (v^2/2 + Sigma(w), -v sigma(w)).
std::pair<double, double> entropy_pair(double w, double v, const StressLaw& law);

struct WeakValue {
  double value = 0.0;
  double test_norm = 0.0;  ///< int int |phi| + |phi_x| + |phi_t|
};

/// Default free-region margin 2 sqrt(2 eps E(0)).
double default_margin(const Trajectory& traj);

/// Throws SupportError when the support of `test` meets {excess > -margin},
/// i.e. the test is not inside {u > margin} (or {margin - 1 < u < 1 - margin}).
void check_free_support(const Trajectory& traj, const TestFunction& test, double margin);

/// int int eta phi_t + H phi_x; the entropy inequality predicts >= 0.
WeakValue entropy_residual(const Trajectory& traj, const TestFunction& test, double margin);

/// Deterministic family of admissible nonnegative tests in the free region,
/// with centers in `window`. May return fewer than `count` if the free region
/// is too small.
std::vector<TestFunction> generate_entropy_tests(const Trajectory& traj, std::size_t count, unsigned seed,
                                                 double margin, Window window);

LatticeField comparison_field(const Trajectory& traj, const ComparisonSpec& spec);

/// Throws DomainError unless zeta is admissible on every record and vanishes at T.
void check_admissible_comparison(const Trajectory& traj, const LatticeField& zeta);

struct VariationalValue {
  double value = 0.0;  ///< A - B - C, predicted >= 0
  double scale = 0.0;  ///< int int (|sigma(w) w| + v^2) + int |v0 u0|
};

/// int int sigma(u_x)(zeta_x - u_x) - int int u_t(zeta_t - u_t) - int v0(zeta(0) - u0).
VariationalValue variational_residual(const Trajectory& traj, const LatticeField& zeta);

std::vector<ComparisonSpec> generate_comparisons(const Trajectory& traj, std::size_t count, unsigned seed,
                                                 Window window);

/// Fraction of int int |(zeta - u) S_eps[u]| carried by cells where the
/// penalty is active, S_eps the discrete strong residual between records.
double residual_localization(const Trajectory& traj, const LatticeField& zeta);

/// eps int_0^T int chi^2 (D_+ v)^2 dx dt.
double defect_measure_proxy(const Trajectory& traj, const TestFunction& chi);

struct SerreShearer {
  double strain_dissipation = 0.0;  ///< eps int int sigma'(w) (D_+ w)^2
  double strain_gradient = 0.0;     ///< (eps^2 / 2) int (D_+ w)^2 at T
  double kinetic = 0.0;             ///< int v^2 at T
  double velocity_dissipation = 0.0;///< eps int int (D_+ v)^2
  double sum = 0.0;
  double ratio = 0.0;               ///< sum / (1 + T)
};
SerreShearer serre_shearer_terms(const Trajectory& traj);

/// max over node pairs in K of |u(x) - u(y)| / |x - y|^alpha, per record.
std::vector<double> holder_modulus(const Trajectory& traj, double alpha, Window window);
double holder_modulus(const State& state, double dx, double half_width, double alpha, Window window);

/// int chi^2 (v^2/2 + Sigma(w) + Phi_eps(u)) dx.
double localized_energy(const State& state, double dx, double half_width, const std::function<double(double)>& chi,
                        const StressLaw& law, double eps_pen, ObstacleMode mode);

/// ||v||_{L2(K x [0,T])}.
double velocity_norm(const Trajectory& traj, Window window);

// ---------------------------------------------------------------------------

struct ReportRow {
  std::string diagnostic;
  double epsilon = 0.0;
  std::size_t cells = 0;
  double horizon = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct DiagnosticsReport {
  std::vector<ReportRow> rows;
  bool all_pass() const;
  /// Value of the first row named `diagnostic`; throws DomainError if absent.
  double value(const std::string& diagnostic) const;
};

/// Standard battery for one trajectory, tolerances from the config.
DiagnosticsReport diagnose(const Trajectory& traj);

/// CSV with header `diagnostic,epsilon,n,T,window_lo,window_hi,value,tolerance,pass`,
/// preceded by the effective config as '# ' comment lines.
std::string report_csv(const DiagnosticsReport& report, const std::string& effective_config);
void write_report(const std::string& path, const DiagnosticsReport& report, const std::string& effective_config);

}  // namespace obstacle

#include "obstacle/diagnostics.hpp"

#include "obstacle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace obstacle {

namespace {

double bump_derivative(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double a = 1.0 - s * s;
  return -6.0 * s * a * a;
}

// Trapezoidal weights over the record times, restricted to t <= horizon.
std::vector<double> time_weights(const Trajectory& traj, double horizon = std::numeric_limits<double>::infinity()) {
  const auto& r = traj.records;
  std::size_t m = 0;
  while (m < r.size() && r[m].t <= horizon * (1.0 + 1e-12)) ++m;
  std::vector<double> w(r.size(), 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = r[k + 1].t - r[k].t;
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

struct WindowNodes {
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

WindowNodes window_nodes(const Grid& grid, Window window) {
  WindowNodes out;
  const double dx = grid.dx();
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double x = grid.x(i);
    if (x >= window.lo - 1e-12 * dx && x <= window.hi + 1e-12 * dx) {
      out.index.push_back(i);
      out.weight.push_back(dx);
    }
  }
  if (!out.weight.empty()) {
    out.weight.front() *= 0.5;
    out.weight.back() *= 0.5;
  }
  return out;
}

double excess_of(double u, ObstacleMode mode) { return constraint_excess(u, mode); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// --- test functions --------------------------------------------------------

TestFunction TestFunction::cutoff(double x0, double rx) {
  TestFunction f;
  f.x0 = x0;
  f.rx = rx;
  f.spatial_only = true;
  return f;
}

TestFunction TestFunction::space_time(double x0, double rx, double t0, double rt) {
  return TestFunction{x0, rx, t0, rt, false};
}

double TestFunction::value(double x, double t) const {
  const double bx = bump_profile((x - x0) / rx);
  if (spatial_only || bx == 0.0) return bx;
  return bx * bump_profile((t - t0) / rt);
}

double TestFunction::d_dx(double x, double t) const {
  const double dbx = bump_derivative((x - x0) / rx) / rx;
  if (spatial_only) return dbx;
  return dbx * bump_profile((t - t0) / rt);
}

double TestFunction::d_dt(double x, double t) const {
  if (spatial_only) return 0.0;
  return bump_profile((x - x0) / rx) * bump_derivative((t - t0) / rt) / rt;
}

// --- energy ------------------------------------------------------------------

std::vector<double> energy_balance_residual(const Trajectory& traj) {
  std::vector<double> out;
  if (traj.energy.empty()) return out;
  const double e0 = traj.energy.front().total();
  const double denom = std::max(e0, 1e-30);
  for (const auto& e : traj.energy) out.push_back(std::abs(e.total() + e.dissipation - e0) / denom);
  return out;
}

// --- penalty and constraint --------------------------------------------------

double penalty_l1(const Trajectory& traj, Window window, double horizon) {
  const auto tw = time_weights(traj, horizon);
  const auto nodes = window_nodes(traj.grid(), window);
  const auto mode = traj.config.mode;
  double total = 0.0;
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    if (tw[m] == 0.0) continue;
    const auto& u = traj.records[m].u;
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.index.size(); ++k) s += nodes.weight[k] * excess_of(u[nodes.index[k]], mode);
    total += tw[m] * s;
  }
  return total / traj.config.eps_pen();
}

double penalty_l1_from_force(const Trajectory& traj, Window window, double horizon) {
  const auto tw = time_weights(traj, horizon);
  const auto nodes = window_nodes(traj.grid(), window);
  const auto mode = traj.config.mode;
  const double eps = traj.config.eps_pen();
  double total = 0.0;
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    if (tw[m] == 0.0) continue;
    const auto& u = traj.records[m].u;
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.index.size(); ++k)
      s += nodes.weight[k] * std::abs(penalty_force(u[nodes.index[k]], eps, mode));
    total += tw[m] * s;
  }
  return total;
}

ViolationNorms constraint_violation(const Trajectory& traj) {
  ViolationNorms out;
  const auto tw = time_weights(traj);
  const double dx = traj.grid().dx();
  double st = 0.0;
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    double s = 0.0;
    for (double u : traj.records[m].u) {
      const double e = excess_of(u, traj.config.mode);
      s += e * e;
      out.linf = std::max(out.linf, e);
    }
    s *= dx;
    out.max_spatial_l2 = std::max(out.max_spatial_l2, std::sqrt(s));
    st += tw[m] * s;
  }
  out.l2_space_time = std::sqrt(st);
  return out;
}

// --- entropy -----------------------------------------------------------------

std::pair<double, double> entropy_pair(double w, double v, const StressLaw& law) {
  return {0.5 * v * v + law.potential(w), -v * law.sigma(w)};
}

double default_margin(const Trajectory& traj) {
  const double e0 = traj.energy.empty() ? 0.0 : traj.energy.front().total();
  return 2.0 * std::sqrt(2.0 * traj.config.eps_pen() * e0);
}

void check_free_support(const Trajectory& traj, const TestFunction& test, double margin) {
  const Grid grid = traj.grid();
  const auto mode = traj.config.mode;
  if (test.x0 - test.rx < -grid.half_width || test.x0 + test.rx > grid.half_width)
    throw SupportError("test function support leaves the grid");
  const double dx = grid.dx();
  const auto first = std::size_t(std::max(0.0, std::floor((test.x0 - test.rx + grid.half_width) / dx)));
  const auto last = std::min(grid.cells - 1, std::size_t(std::ceil((test.x0 + test.rx + grid.half_width) / dx)));
  for (const auto& rec : traj.records) {
    if (!test.spatial_only && std::abs(rec.t - test.t0) >= test.rt) continue;
    for (std::size_t i = first; i <= last; ++i) {
      if (test.value(grid.x(i), rec.t) <= 0.0) continue;
      const double u = rec.u[i];
      const bool free = mode == ObstacleMode::One ? u > margin : (u > margin - 1.0 && u < 1.0 - margin);
      if (!free) {
        std::ostringstream os;
        os << "test function support meets the contact set at x=" << grid.x(i) << ", t=" << rec.t << " (u=" << u
           << ", margin " << margin << ")";
        throw SupportError(os.str());
      }
    }
  }
}

WeakValue entropy_residual(const Trajectory& traj, const TestFunction& test, double margin) {
  check_free_support(traj, test, margin);
  const Grid grid = traj.grid();
  const double dx = grid.dx();
  const StressLaw law = traj.config.law.build();
  const auto tw = time_weights(traj);
  const auto first = std::size_t(std::max(0.0, std::floor((test.x0 - test.rx + grid.half_width) / dx)));
  const auto last = std::min(grid.cells - 1, std::size_t(std::ceil((test.x0 + test.rx + grid.half_width) / dx)));
  WeakValue out;
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    const auto& rec = traj.records[m];
    if (!test.spatial_only && std::abs(rec.t - test.t0) >= test.rt) continue;
    double s = 0.0, norm = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
      const double x = grid.x(i);
      if (std::abs(x - test.x0) >= test.rx) continue;
      const auto [eta, flux] = entropy_pair(rec.w[i], rec.v[i], law);
      const double pt = test.d_dt(x, rec.t);
      const double px = test.d_dx(x, rec.t);
      s += eta * pt + flux * px;
      norm += std::abs(test.value(x, rec.t)) + std::abs(px) + std::abs(pt);
    }
    out.value += tw[m] * dx * s;
    out.test_norm += tw[m] * dx * norm;
  }
  return out;
}

std::vector<TestFunction> generate_entropy_tests(const Trajectory& traj, std::size_t count, unsigned seed,
                                                 double margin, Window window) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double T = traj.config.horizon;
  std::vector<TestFunction> out;
  const std::size_t max_attempts = 500 * count;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt) {
    const double rx = 0.1 + 0.4 * unit(rng);
    const double x0 = window.lo + (window.hi - window.lo) * unit(rng);
    const double rt = T * (0.05 + 0.2 * unit(rng));
    const double t0 = rt + (T - 2.0 * rt) * unit(rng);
    const auto test = TestFunction::space_time(x0, rx, t0, rt);
    try {
      check_free_support(traj, test, margin);
    } catch (const SupportError&) {
      continue;
    }
    out.push_back(test);
  }
  return out;
}

// --- variational -------------------------------------------------------------

LatticeField comparison_field(const Trajectory& traj, const ComparisonSpec& spec) {
  const Grid grid = traj.grid();
  const double T = traj.config.horizon;
  const double fade = std::clamp(spec.fade, 1e-12, T);
  LatticeField zeta(traj.records.size(), std::vector<double>(grid.cells));
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    const auto& rec = traj.records[m];
    const double tau = rec.t <= T - fade ? 1.0 : bump_profile((rec.t - (T - fade)) / fade);
    for (std::size_t i = 0; i < grid.cells; ++i) {
      const double raw = tau * (rec.u[i] + spec.beta * spec.bump.value(grid.x(i), rec.t));
      zeta[m][i] = project_admissible(raw, traj.config.mode);
    }
  }
  return zeta;
}

void check_admissible_comparison(const Trajectory& traj, const LatticeField& zeta) {
  if (zeta.size() != traj.records.size()) throw DomainError("comparison field does not match the record lattice");
  const auto mode = traj.config.mode;
  for (std::size_t m = 0; m < zeta.size(); ++m) {
    if (zeta[m].size() != traj.config.cells) throw DomainError("comparison field does not match the grid");
    for (double z : zeta[m]) {
      if (!std::isfinite(z) || constraint_excess(z, mode) > 0.0)
        throw DomainError("comparison function is not admissible at t=" + fmt(traj.records[m].t));
    }
  }
  for (double z : zeta.back())
    if (std::abs(z) > 1e-14) throw DomainError("comparison function must vanish at the horizon");
}

VariationalValue variational_residual(const Trajectory& traj, const LatticeField& zeta) {
  check_admissible_comparison(traj, zeta);
  const Grid grid = traj.grid();
  const std::size_t n = grid.cells;
  const double dx = grid.dx();
  const StressLaw law = traj.config.law.build();
  const auto tw = time_weights(traj);
  const auto& rec = traj.records;
  const std::size_t M = rec.size();

  double a = 0.0, b = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const auto& z = zeta[m];
    std::size_t mp = std::min(m + 1, M - 1), mm = m == 0 ? 0 : m - 1;
    const double dt = rec[mp].t - rec[mm].t;
    double sa = 0.0, sb = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zx = (z[(i + 1) % n] - z[(i + n - 1) % n]) / (2.0 * dx);
      const double zt = dt > 0.0 ? (zeta[mp][i] - zeta[mm][i]) / dt : 0.0;
      const double w = rec[m].w[i];
      const double v = rec[m].v[i];
      const double s = law.sigma(w);
      sa += s * (zx - w);
      sb += v * (zt - v);
      ss += std::abs(s * w) + v * v;
    }
    a += tw[m] * dx * sa;
    b += tw[m] * dx * sb;
    scale += tw[m] * dx * ss;
  }
  double c = 0.0, c_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c += rec[0].v[i] * (zeta[0][i] - rec[0].u[i]);
    c_scale += std::abs(rec[0].v[i] * rec[0].u[i]);
  }
  c *= dx;
  c_scale *= dx;
  return VariationalValue{a - b - c, scale + c_scale};
}

std::vector<ComparisonSpec> generate_comparisons(const Trajectory& traj, std::size_t count, unsigned seed,
                                                 Window window) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double T = traj.config.horizon;
  std::vector<ComparisonSpec> out;
  for (std::size_t k = 0; k < count; ++k) {
    ComparisonSpec spec;
    spec.beta = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.05 + 0.45 * unit(rng));
    const double rx = 0.2 + 0.6 * unit(rng);
    const double x0 = window.lo + (window.hi - window.lo) * unit(rng);
    const double rt = T * (0.1 + 0.3 * unit(rng));
    const double t0 = T * unit(rng);
    spec.bump = TestFunction::space_time(x0, rx, t0, rt);
    spec.fade = 0.1 * T;
    out.push_back(spec);
  }
  return out;
}

double residual_localization(const Trajectory& traj, const LatticeField& zeta) {
  const Grid grid = traj.grid();
  const std::size_t n = grid.cells;
  const double dx = grid.dx();
  const StressLaw law = traj.config.law.build();
  const double nu = traj.config.eps_visc() / (dx * dx);
  const auto mode = traj.config.mode;
  const auto& rec = traj.records;

  const auto spatial = [&](const State& s, std::size_t i) {
    const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
    return (law.sigma(s.w[ip]) - law.sigma(s.w[im])) / (2.0 * dx) + nu * (s.v[ip] - 2.0 * s.v[i] + s.v[im]);
  };
  double active = 0.0, total = 0.0;
  for (std::size_t m = 0; m + 1 < rec.size(); ++m) {
    const double dt = rec[m + 1].t - rec[m].t;
    if (!(dt > 0.0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double strong =
          (rec[m + 1].v[i] - rec[m].v[i]) / dt - 0.5 * (spatial(rec[m], i) + spatial(rec[m + 1], i));
      const double gap = 0.5 * (zeta[m][i] + zeta[m + 1][i]) - 0.5 * (rec[m].u[i] + rec[m + 1].u[i]);
      const double rho = std::abs(gap * strong) * dt * dx;
      total += rho;
      if (constraint_excess(rec[m].u[i], mode) > 0.0 || constraint_excess(rec[m + 1].u[i], mode) > 0.0)
        active += rho;
    }
  }
  return total > 0.0 ? active / total : 1.0;
}

// --- dissipation, Serre-Shearer, Hoelder ------------------------------------

double defect_measure_proxy(const Trajectory& traj, const TestFunction& chi) {
  const Grid grid = traj.grid();
  const std::size_t n = grid.cells;
  const double dx = grid.dx();
  const auto tw = time_weights(traj);
  std::vector<double> chi2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = chi.value(grid.x(i), 0.0);
    chi2[i] = c * c;
  }
  double total = 0.0;
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    const auto& v = traj.records[m].v;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n;
      const double d = v[ip] - v[i];
      s += 0.5 * (chi2[i] + chi2[ip]) * d * d;
    }
    total += tw[m] * s / dx;
  }
  return traj.config.eps_visc() * total;
}

SerreShearer serre_shearer_terms(const Trajectory& traj) {
  SerreShearer out;
  const Grid grid = traj.grid();
  const std::size_t n = grid.cells;
  const double dx = grid.dx();
  const double eps = traj.config.eps_visc();
  const StressLaw law = traj.config.law.build();
  const auto tw = time_weights(traj);
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    if (tw[m] == 0.0) continue;
    const auto& w = traj.records[m].w;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n;
      const double d = w[ip] - w[i];
      s += law.sigma_prime(0.5 * (w[i] + w[ip])) * d * d;
    }
    out.strain_dissipation += tw[m] * s / dx;
  }
  out.strain_dissipation *= eps;
  const auto& last = traj.records.back();
  double g = 0.0, k = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = last.w[(i + 1) % n] - last.w[i];
    g += d * d;
    k += last.v[i] * last.v[i];
  }
  out.strain_gradient = 0.5 * eps * eps * g / dx;
  out.kinetic = k * dx;
  out.velocity_dissipation = traj.dissipation.back();
  out.sum = out.strain_dissipation + out.strain_gradient + out.kinetic + out.velocity_dissipation;
  out.ratio = out.sum / (1.0 + last.t);
  return out;
}

double holder_modulus(const State& state, double dx, double half_width, double alpha, Window window) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("Hoelder exponent must lie in (0, 1/2)");
  const Grid grid{half_width, state.size()};
  const auto nodes = window_nodes(grid, window);
  const std::size_t m = nodes.index.size();
  std::vector<double> inv(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) inv[k] = 1.0 / std::pow(double(k) * dx, alpha);
  double best = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    const double ua = state.u[nodes.index[a]];
    for (std::size_t b = a + 1; b < m; ++b)
      best = std::max(best, std::abs(state.u[nodes.index[b]] - ua) * inv[b - a]);
  }
  return best;
}

std::vector<double> holder_modulus(const Trajectory& traj, double alpha, Window window) {
  std::vector<double> out;
  const double dx = traj.grid().dx();
  for (const auto& rec : traj.records) out.push_back(holder_modulus(rec, dx, traj.config.half_width, alpha, window));
  return out;
}

double localized_energy(const State& state, double dx, double half_width, const std::function<double(double)>& chi,
                        const StressLaw& law, double eps_pen, ObstacleMode mode) {
  const Grid grid{half_width, state.size()};
  double s = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double c = chi(grid.x(i));
    if (c == 0.0) continue;
    s += c * c *
         (0.5 * state.v[i] * state.v[i] + law.potential(state.w[i]) + penalty_potential(state.u[i], eps_pen, mode));
  }
  return s * dx;
}

double velocity_norm(const Trajectory& traj, Window window) {
  const auto tw = time_weights(traj);
  const auto nodes = window_nodes(traj.grid(), window);
  double total = 0.0;
  for (std::size_t m = 0; m < traj.records.size(); ++m) {
    const auto& v = traj.records[m].v;
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.index.size(); ++k) {
      const double vi = v[nodes.index[k]];
      s += nodes.weight[k] * vi * vi;
    }
    total += tw[m] * s;
  }
  return std::sqrt(total);
}

// --- report -----------------------------------------------------------------

bool DiagnosticsReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

double DiagnosticsReport::value(const std::string& diagnostic) const {
  for (const auto& r : rows)
    if (r.diagnostic == diagnostic) return r.value;
  throw DomainError("report has no row '" + diagnostic + "'");
}

DiagnosticsReport diagnose(const Trajectory& traj) {
  DiagnosticsReport rep;
  const auto& cfg = traj.config;
  const Grid grid = traj.grid();
  const Window K{cfg.diagnostics.window_lo, cfg.diagnostics.window_hi};
  const Window full{-cfg.half_width, cfg.half_width};
  const double T = cfg.horizon;
  const double eps = cfg.epsilon;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double e0 = traj.energy.front().total();

  const auto add = [&](const std::string& name, Window w, double value, double tol, bool pass) {
    rep.rows.push_back(ReportRow{name, eps, cfg.cells, T, w.lo, w.hi, value, tol, pass});
  };
  const auto info = [&](const std::string& name, Window w, double value) { add(name, w, value, nan, true); };

  const auto bal = energy_balance_residual(traj);
  const double bal_max = *std::max_element(bal.begin(), bal.end());
  add("energy_balance_residual_max", full, bal_max, cfg.diagnostics.energy_tolerance,
      bal_max <= cfg.diagnostics.energy_tolerance);

  double pen_max = 0.0;
  for (const auto& e : traj.energy) pen_max = std::max(pen_max, e.penalty);
  add("penalty_potential_max", full, pen_max, e0, pen_max <= e0 * (1.0 + 1e-12));

  const auto viol = constraint_violation(traj);
  const double spatial_bound = std::sqrt(2.0 * cfg.eps_pen() * e0);
  add("constraint_l2_max_over_records", full, viol.max_spatial_l2, spatial_bound,
      viol.max_spatial_l2 <= spatial_bound * (1.0 + 1e-12));
  add("constraint_l2_space_time", full, viol.l2_space_time, std::sqrt(T) * spatial_bound,
      viol.l2_space_time <= std::sqrt(T) * spatial_bound * (1.0 + 1e-12));
  info("constraint_linf", full, viol.linf);

  double drift = 0.0;
  for (const auto& r : traj.records) drift = std::max(drift, consistency_w_vs_ux(r, grid.dx()));
  add("w_vs_ux_drift_max", full, drift, 1e-8, drift <= 1e-8);

  if (cfg.mode == ObstacleMode::One) {
    double worst = 0.0, scale = 0.0;
    double prev = 0.0;
    for (std::size_t m = 0; m < traj.records.size(); ++m) {
      double p = 0.0;
      for (double v : traj.records[m].v) p += v;
      p *= grid.dx();
      scale = std::max(scale, std::abs(p));
      if (m > 0) worst = std::min(worst, p - prev);
      prev = p;
    }
    const double tol = 1e-12 * (1.0 + scale) * double(cfg.cells);
    add("momentum_decrease_max", full, -worst, tol, -worst <= tol);
  }

  info("penalty_l1", K, penalty_l1(traj, K, T));
  const TestFunction chi = TestFunction::cutoff(0.5 * (K.lo + K.hi), 0.5 * (K.hi - K.lo));
  const double defect = defect_measure_proxy(traj, chi);
  add("defect_measure_proxy", K, defect, e0, defect <= e0);
  const auto ss = serre_shearer_terms(traj);
  info("serre_shearer_strain_dissipation", full, ss.strain_dissipation);
  info("serre_shearer_strain_gradient", full, ss.strain_gradient);
  info("serre_shearer_kinetic", full, ss.kinetic);
  info("serre_shearer_velocity_dissipation", full, ss.velocity_dissipation);
  info("serre_shearer_sum", full, ss.sum);
  info("serre_shearer_ratio", full, ss.ratio);
  const auto hold = holder_modulus(traj, cfg.diagnostics.holder_alpha, K);
  info("holder_modulus_max", K, *std::max_element(hold.begin(), hold.end()));
  info("velocity_norm_KT", K, velocity_norm(traj, K));

  // The free-region margin is a choice, so report the default and its sensitivity.
  for (const double factor : {1.0, 0.5, 2.0}) {
    const double margin = factor * default_margin(traj);
    const auto tests = generate_entropy_tests(traj, cfg.diagnostics.test_count, cfg.diagnostics.seed, margin, K);
    double worst_entropy = std::numeric_limits<double>::infinity();
    for (const auto& t : tests) {
      const auto r = entropy_residual(traj, t, margin);
      if (r.test_norm > 0.0) worst_entropy = std::min(worst_entropy, r.value / r.test_norm);
    }
    const std::string suffix = factor == 1.0 ? "" : factor < 1.0 ? "_margin_half" : "_margin_double";
    info("entropy_tests_generated" + suffix, K, double(tests.size()));
    info("entropy_residual_min_relative" + suffix, K, tests.empty() ? nan : worst_entropy);
  }

  double worst_var = std::numeric_limits<double>::infinity();
  double localization = nan;
  for (const auto& spec : generate_comparisons(traj, cfg.diagnostics.test_count, cfg.diagnostics.seed, K)) {
    const auto zeta = comparison_field(traj, spec);
    const auto r = variational_residual(traj, zeta);
    worst_var = std::min(worst_var, r.scale > 0.0 ? r.value / r.scale : r.value);
    if (std::isnan(localization)) localization = residual_localization(traj, zeta);
  }
  info("variational_residual_min_relative", K, worst_var);
  info("variational_localization", K, localization);
  return rep;
}

std::string report_csv(const DiagnosticsReport& report, const std::string& effective_config) {
  std::ostringstream os;
  os << "# --- config ---\n";
  std::istringstream cfg(effective_config);
  std::string line;
  while (std::getline(cfg, line)) os << (line.empty() ? "#" : "# " + line) << "\n";
  os << "# --- config ---\n";
  os << "diagnostic,epsilon,n,T,window_lo,window_hi,value,tolerance,pass\n";
  for (const auto& r : report.rows)
    os << r.diagnostic << "," << fmt(r.epsilon) << "," << r.cells << "," << fmt(r.horizon) << "," << fmt(r.window_lo)
       << "," << fmt(r.window_hi) << "," << fmt(r.value) << "," << fmt(r.tolerance) << "," << (r.pass ? 1 : 0)
       << "\n";
  return os.str();
}

void write_report(const std::string& path, const DiagnosticsReport& report, const std::string& effective_config) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write report '" + path + "'");
  out << report_csv(report, effective_config);
}

}  // namespace obstacle

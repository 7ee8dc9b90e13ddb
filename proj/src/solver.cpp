#include "obstacle/solver.hpp"

#include "obstacle/errors.hpp"
#include "obstacle/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace obstacle {

namespace {

// Periodic centered difference.
void d0(const std::vector<double>& f, double dx, std::vector<double>& out) {
  const std::size_t n = f.size();
  const double inv = 1.0 / (2.0 * dx);
  out[0] = (f[1] - f[n - 1]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv;
  out[n - 1] = (f[0] - f[n - 2]) * inv;
}

double forward_energy(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    s += d * d;
  }
  const double d = f[0] - f[n - 1];
  s += d * d;
  return s / dx;  // = dx * sum (D_+ f)^2
}

bool all_finite(const State& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += s.u[i] + s.w[i] + s.v[i];
  return std::isfinite(acc);
}

const SimConfig& validated(const SimConfig& config) {
  config.validate();
  return config;
}

}  // namespace

double bump_profile(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double a = 1.0 - s * s;
  return a * a * a;
}

double consistency_w_vs_ux(const State& state, double dx) {
  const std::size_t n = state.size();
  if (n < 3) return 0.0;
  std::vector<double> ux(n);
  d0(state.u, dx, ux);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(state.w[i] - ux[i]));
  return m;
}

EnergyLedger energy_ledger(const State& state, double dx, const StressLaw& law, double eps_pen,
                           ObstacleMode mode, double dissipation) {
  EnergyLedger e;
  e.time = state.t;
  e.dissipation = dissipation;
  for (std::size_t i = 0; i < state.size(); ++i) {
    e.kinetic += 0.5 * state.v[i] * state.v[i];
    e.elastic += law.potential(state.w[i]);
    e.penalty += penalty_potential(state.u[i], eps_pen, mode);
  }
  e.kinetic *= dx;
  e.elastic *= dx;
  e.penalty *= dx;
  return e;
}

void sample_initial(const SimConfig& config, std::vector<double>& u0, std::vector<double>& v0) {
  const Grid grid{config.half_width, config.cells};
  const std::size_t n = grid.cells;
  u0.assign(n, config.initial.offset);
  v0.assign(n, 0.0);
  const auto& init = config.initial;
  if (init.kind == InitialKind::File) {
    const Snapshot snap = read_snapshot(init.file);
    if (snap.state.size() != n)
      throw ConfigError("initial file '" + init.file + "' has " + std::to_string(snap.state.size()) +
                            " nodes, grid has " + std::to_string(n),
                        "file");
    if (snap.half_width != config.half_width)
      throw ConfigError("initial file '" + init.file + "' was written for a different half_width", "file");
    u0 = snap.state.u;
    v0 = snap.state.v;
    return;
  }
  if (init.kind == InitialKind::Constant) return;
  const auto add = [&](const BumpSpec& b) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = bump_profile((grid.x(i) - b.center) / b.width);
      u0[i] += b.amplitude * p;
      v0[i] += b.velocity * p;
    }
  };
  add(init.first);
  if (init.kind == InitialKind::TwoBump) add(init.second);
}

Solver::Solver(SimConfig config)
    : config_(std::move(config)), law_(validated(config_).law.build()), grid_{config_.half_width, config_.cells} {
  const std::size_t n = grid_.cells;
  stress_.resize(n);
  acc_.resize(n);
  uh_.resize(n);
  wh_.resize(n);
  vh_.resize(n);
}

State Solver::initialize() const {
  const std::size_t n = grid_.cells;
  const double dx = grid_.dx();
  const auto& init = config_.initial;
  State s;
  s.t = 0.0;
  sample_initial(config_, s.u, s.v);

  // Initial perturbation must sit inside (-R/2, R/2) so the wrap guard is meaningful.
  const double h = init.kind == InitialKind::File ? 0.0 : init.mollify_cells * dx;
  const double limit = 0.5 * config_.half_width;
  if (init.kind == InitialKind::Bump || init.kind == InitialKind::TwoBump) {
    const auto check = [&](const BumpSpec& b, const char* key) {
      if (b.amplitude == 0.0 && b.velocity == 0.0) return;
      if (b.center - b.width - h <= -limit || b.center + b.width + h >= limit)
        throw ConfigError(std::string("initial bump (") + key + ") is not supported inside (-R/2, R/2)", key);
    };
    check(init.first, "center");
    if (init.kind == InitialKind::TwoBump) check(init.second, "center2");
  } else if (init.kind == InitialKind::File) {
    const double far = s.u[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(grid_.x(i)) < limit) continue;
      if (std::abs(s.u[i] - far) > 1e-14 || std::abs(s.v[i]) > 1e-14)
        throw ConfigError("initial file data is not compactly supported inside (-R/2, R/2)", "file");
    }
  }

  if (h > 0.0) {
    const auto reach = std::size_t(std::ceil(h / dx));
    std::vector<double> kernel(2 * reach + 1);
    double total = 0.0;
    for (std::size_t j = 0; j < kernel.size(); ++j) {
      const double offset = (double(j) - double(reach)) * dx;
      kernel[j] = bump_profile(offset / h);
      total += kernel[j];
    }
    for (double& k : kernel) k /= total;
    const auto smooth = [&](std::vector<double>& f) {
      std::vector<double> out(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kernel.size(); ++j) {
          const std::size_t idx = (i + n + j - reach) % n;
          acc += kernel[j] * f[idx];
        }
        out[i] = acc;
      }
      f.swap(out);
    };
    smooth(s.u);
    smooth(s.v);
  }
  for (double& u : s.u) u = project_admissible(u, config_.mode);
  s.w.resize(n);
  d0(s.u, dx, s.w);
  return s;
}

double Solver::wave_speed(const State& state) const {
  double c2 = 0.0;
  for (double w : state.w) {
    if (!std::isfinite(w)) throw NumericError("non-finite strain while computing the wave speed");
    c2 = std::max(c2, law_.sigma_prime(w));
  }
  return std::sqrt(c2);
}

double Solver::compute_dt(const State& state) const {
  const double dx = grid_.dx();
  const double c = wave_speed(state);
  double bound = dx * dx / (2.0 * config_.eps_visc());
  if (c > 0.0) bound = std::min(bound, dx / c);
  if (config_.scheme == Scheme::Explicit) bound = std::min(bound, config_.eps_pen());
  const double dt = config_.cfl * bound;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericError("time step is not positive");
  return dt;
}

void Solver::acceleration(const std::vector<double>& u, const std::vector<double>& w,
                          const std::vector<double>& v, bool with_penalty, std::vector<double>& out) {
  const std::size_t n = grid_.cells;
  const double dx = grid_.dx();
  for (std::size_t i = 0; i < n; ++i) stress_[i] = law_.sigma(w[i]);
  d0(stress_, dx, out);
  const double nu = config_.eps_visc() / (dx * dx);
  out[0] += nu * (v[1] - 2.0 * v[0] + v[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] += nu * (v[i + 1] - 2.0 * v[i] + v[i - 1]);
  out[n - 1] += nu * (v[0] - 2.0 * v[n - 1] + v[n - 2]);
  if (with_penalty) {
    const double eps = config_.eps_pen();
    for (std::size_t i = 0; i < n; ++i) out[i] -= penalty_force(u[i], eps, config_.mode);
  }
}

StepIncrement Solver::step_explicit(State& s, double dt) {
  const std::size_t n = grid_.cells;
  const double dx = grid_.dx();
  const double half = 0.5 * dt;

  // Midpoint predictor.
  acceleration(s.u, s.w, s.v, true, acc_);
  d0(s.v, dx, wh_);
  for (std::size_t i = 0; i < n; ++i) {
    uh_[i] = s.u[i] + half * s.v[i];
    wh_[i] = s.w[i] + half * wh_[i];
    vh_[i] = s.v[i] + half * acc_[i];
  }

  StepIncrement inc;
  inc.dissipation = dt * config_.eps_visc() * forward_energy(vh_, dx);
  {
    const double eps = config_.eps_pen();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m -= penalty_force(uh_[i], eps, config_.mode);
    inc.momentum = dt * dx * m;
  }

  // Corrector: every field is advanced with the same stage velocity vh.
  acceleration(uh_, wh_, vh_, true, acc_);
  d0(vh_, dx, stress_);
  for (std::size_t i = 0; i < n; ++i) {
    s.u[i] += dt * vh_[i];
    s.w[i] += dt * stress_[i];
    s.v[i] += dt * acc_[i];
  }
  return inc;
}

StepIncrement Solver::step_semi_implicit(State& s, double dt) {
  const std::size_t n = grid_.cells;
  const double dx = grid_.dx();
  const double half = 0.5 * dt;
  const double eps = config_.eps_pen();

  acceleration(s.u, s.w, s.v, false, acc_);
  d0(s.v, dx, wh_);
  for (std::size_t i = 0; i < n; ++i) {
    wh_[i] = s.w[i] + half * wh_[i];
    vh_[i] = s.v[i] + half * acc_[i];
  }
  acceleration(s.u, wh_, vh_, false, acc_);

  StepIncrement inc;
  inc.dissipation = dt * config_.eps_visc() * forward_energy(vh_, dx);
  double momentum = 0.0;
  const double dt2 = dt * dt;
  for (std::size_t i = 0; i < n; ++i) {
    // u' + dt^2 F(u') = u + dt (v + dt a), then v' = (u' - u) / dt.
    const double target = s.u[i] + dt * (s.v[i] + dt * acc_[i]);
    const double unew = solve_implicit_penalty(target, dt2, eps, config_.mode);
    const double vnew = (unew - s.u[i]) / dt;
    momentum += vnew - s.v[i];
    uh_[i] = unew;
    vh_[i] = vnew;
  }
  inc.momentum = dx * momentum;
  d0(vh_, dx, acc_);
  for (std::size_t i = 0; i < n; ++i) {
    s.w[i] += dt * acc_[i];
    s.u[i] = s.u[i] + dt * vh_[i];
    s.v[i] = vh_[i];
  }
  return inc;
}

StepIncrement Solver::step(State& state, double dt, std::size_t step_index) {
  if (state.size() != grid_.cells || state.w.size() != grid_.cells || state.v.size() != grid_.cells)
    throw DomainError("state does not match the grid");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const StepIncrement inc =
      config_.scheme == Scheme::Explicit ? step_explicit(state, dt) : step_semi_implicit(state, dt);
  state.t += dt;
  if (!all_finite(state) || !std::isfinite(inc.dissipation))
    throw BlowUpError("non-finite field value at step " + std::to_string(step_index), step_index);
  return inc;
}

Trajectory Solver::run() {
  Trajectory traj;
  traj.config = config_;
  const double T = config_.horizon;
  const double limit = 0.5 * config_.half_width;
  const double dx = grid_.dx();

  State s = initialize();
  double dissipation = 0.0;
  const auto record = [&](const State& st) {
    traj.records.push_back(st);
    traj.dissipation.push_back(dissipation);
    traj.energy.push_back(energy_ledger(st, dx, law_, config_.eps_pen(), config_.mode, dissipation));
  };
  const auto guard = [&](double c) {
    traj.max_wave_speed = std::max(traj.max_wave_speed, c);
    if (traj.max_wave_speed * T > limit)
      throw ConfigError("wrap guard: waves of speed " + std::to_string(traj.max_wave_speed) +
                            " could reach the periodic seam before T; need half_width >= " +
                            std::to_string(2.0 * traj.max_wave_speed * T),
                        "half_width");
  };
  guard(wave_speed(s));
  record(s);

  std::size_t k = 0;
  while (s.t < T) {
    double dt = compute_dt(s);
    bool last = false;
    if (s.t + dt >= T * (1.0 - 1e-14)) {
      dt = T - s.t;
      last = true;
    }
    ++k;
    dissipation += step(s, dt, k).dissipation;
    if (last) s.t = T;
    guard(wave_speed(s));
    if (last || k % config_.record_stride == 0) record(s);
  }
  traj.steps = k;
  return traj;
}

State initialize(const SimConfig& config) { return Solver(config).initialize(); }

double compute_dt(const State& state, const SimConfig& config) { return Solver(config).compute_dt(state); }

State step(const State& state, const SimConfig& config, double dt) {
  Solver solver(config);
  State next = state;
  solver.step(next, dt);
  return next;
}

Trajectory run(const SimConfig& config) { return Solver(config).run(); }

}  // namespace obstacle

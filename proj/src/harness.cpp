#include "obstacle/harness.hpp"

#include "obstacle/errors.hpp"
#include "obstacle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>

namespace obstacle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string config_echo(const std::string& text) {
  std::ostringstream os;
  os << "# --- config ---\n";
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) os << (line.empty() ? "#" : "# " + line) << "\n";
  os << "# --- config ---\n";
  return os.str();
}

// u and v on the nodes of K at uniformly spaced times, records interpolated linearly.
struct LatticeSample {
  std::vector<std::vector<double>> u, v;
  std::vector<double> node_weight;
  std::vector<double> time_weight;
};

LatticeSample sample_lattice(const Trajectory& traj, Window K, std::size_t times) {
  LatticeSample out;
  const Grid grid = traj.grid();
  const double dx = grid.dx();
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double x = grid.x(i);
    if (x >= K.lo - 1e-12 * dx && x <= K.hi + 1e-12 * dx) nodes.push_back(i);
  }
  out.node_weight.assign(nodes.size(), dx);
  if (!nodes.empty()) {
    out.node_weight.front() *= 0.5;
    out.node_weight.back() *= 0.5;
  }
  const double T = traj.records.back().t;
  const double h = T / double(times - 1);
  out.time_weight.assign(times, h);
  out.time_weight.front() *= 0.5;
  out.time_weight.back() *= 0.5;

  const auto& rec = traj.records;
  std::size_t k = 0;
  for (std::size_t j = 0; j < times; ++j) {
    const double tau = j + 1 == times ? T : h * double(j);
    while (k + 2 < rec.size() && rec[k + 1].t < tau) ++k;
    const auto& a = rec[k];
    const auto& b = rec[std::min(k + 1, rec.size() - 1)];
    const double span = b.t - a.t;
    const double theta = span > 0.0 ? std::clamp((tau - a.t) / span, 0.0, 1.0) : 0.0;
    std::vector<double> u(nodes.size()), v(nodes.size());
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      const std::size_t i = nodes[m];
      u[m] = (1.0 - theta) * a.u[i] + theta * b.u[i];
      v[m] = (1.0 - theta) * a.v[i] + theta * b.v[i];
    }
    out.u.push_back(std::move(u));
    out.v.push_back(std::move(v));
  }
  return out;
}

struct MemberResult {
  SweepMember summary;
  LatticeSample lattice;
};

MemberResult run_member(const SimConfig& cfg, std::size_t times) {
  MemberResult out;
  const Trajectory traj = run(cfg);
  auto& s = out.summary;
  s.epsilon = cfg.epsilon;
  s.eps_visc = cfg.eps_visc();
  s.eps_pen = cfg.eps_pen();
  s.steps = traj.steps;
  s.initial_energy = traj.energy.front().total();
  s.report = diagnose(traj);
  const auto& r = s.report;
  s.energy_residual_max = r.value("energy_balance_residual_max");
  s.penalty_potential_max = r.value("penalty_potential_max");
  s.violation_l2 = r.value("constraint_l2_space_time");
  s.violation_max_spatial = r.value("constraint_l2_max_over_records");
  s.violation_linf = r.value("constraint_linf");
  s.penalty_l1 = r.value("penalty_l1");
  s.defect = r.value("defect_measure_proxy");
  s.serre_shearer.strain_dissipation = r.value("serre_shearer_strain_dissipation");
  s.serre_shearer.strain_gradient = r.value("serre_shearer_strain_gradient");
  s.serre_shearer.kinetic = r.value("serre_shearer_kinetic");
  s.serre_shearer.velocity_dissipation = r.value("serre_shearer_velocity_dissipation");
  s.serre_shearer.sum = r.value("serre_shearer_sum");
  s.serre_shearer.ratio = r.value("serre_shearer_ratio");
  s.holder_max = r.value("holder_modulus_max");
  s.velocity_norm = r.value("velocity_norm_KT");
  s.entropy_tests = std::size_t(r.value("entropy_tests_generated"));
  s.entropy_min_relative = r.value("entropy_residual_min_relative");
  s.variational_min_relative = r.value("variational_residual_min_relative");
  s.variational_floor = std::max(0.0, -s.variational_min_relative);
  s.localization = r.value("variational_localization");
  out.lattice = sample_lattice(traj, Window{cfg.diagnostics.window_lo, cfg.diagnostics.window_hi}, times);
  return out;
}

oracle::FreeWaveSpec free_wave_of(const InitialSpec& init) {
  std::vector<BumpSpec> bumps;
  if (init.kind == InitialKind::Bump || init.kind == InitialKind::TwoBump) bumps.push_back(init.first);
  if (init.kind == InitialKind::TwoBump) bumps.push_back(init.second);
  oracle::FreeWaveSpec spec;
  spec.far_field = init.offset;
  spec.u0 = [bumps, offset = init.offset](double x) {
    double u = offset;
    for (const auto& b : bumps) {
      const double s = (x - b.center) / b.width;
      if (std::abs(s) < 1.0) u += b.amplitude * std::pow(1.0 - s * s, 3);
    }
    return u;
  };
  spec.v0 = [bumps](double x) {
    double v = 0.0;
    for (const auto& b : bumps) {
      const double s = (x - b.center) / b.width;
      if (std::abs(s) < 1.0) v += b.velocity * std::pow(1.0 - s * s, 3);
    }
    return v;
  };
  spec.support_lo = 0.0;
  spec.support_hi = 0.0;
  if (!bumps.empty()) {
    spec.support_lo = bumps.front().center - bumps.front().width;
    spec.support_hi = bumps.front().center + bumps.front().width;
    for (const auto& b : bumps) {
      spec.support_lo = std::min(spec.support_lo, b.center - b.width);
      spec.support_hi = std::max(spec.support_hi, b.center + b.width);
    }
  }
  return spec;
}

double l2_on_coarse(const std::vector<double>& coarse, const std::vector<double>& fine, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double d = coarse[i] - fine[2 * i];
    s += d * d;
  }
  return std::sqrt(s * dx);
}

}  // namespace

RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  RateFit fit;
  fit.points = lx.size();
  if (lx.size() < 2) {
    fit.slope = fit.intercept = fit.r2 = kNaN;
    return fit;
  }
  const double n = double(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : kNaN;
  fit.intercept = my - fit.slope * mx;
  double res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - res / syy : 1.0;
  return fit;
}

SimConfig with_epsilon(const SimConfig& base, double eps) {
  SimConfig cfg = base;
  const double scale = eps / base.epsilon;
  cfg.epsilon = eps;
  if (cfg.epsilon_visc) *cfg.epsilon_visc *= scale;
  if (cfg.epsilon_pen) *cfg.epsilon_pen *= scale;
  return cfg;
}

SweepReport eps_sweep(const SimConfig& base, const std::vector<double>& eps_list, const SweepOptions& options) {
  if (eps_list.size() < 3) throw DomainError("an epsilon sweep needs at least three values");
  for (std::size_t k = 1; k < eps_list.size(); ++k)
    if (!(eps_list[k] < eps_list[k - 1])) throw DomainError("sweep epsilon list must be strictly decreasing");
  if (options.lattice_times < 2) throw DomainError("sweep lattice needs at least two times");

  SweepReport rep;
  rep.base = base;
  rep.eps = eps_list;

  std::vector<SimConfig> configs;
  for (double eps : eps_list) {
    configs.push_back(with_epsilon(base, eps));
    configs.back().validate();
  }
  std::vector<MemberResult> results(configs.size());
  const auto failing = [&](std::size_t k, const std::exception& e) {
    return std::runtime_error("sweep member eps=" + fmt(eps_list[k]) + " failed: " + e.what());
  };
  if (options.parallel) {
    std::vector<std::future<MemberResult>> futures;
    for (const auto& cfg : configs)
      futures.push_back(std::async(std::launch::async, run_member, cfg, options.lattice_times));
    std::optional<std::runtime_error> error;
    for (std::size_t k = 0; k < futures.size(); ++k) {
      try {
        results[k] = futures[k].get();
      } catch (const std::exception& e) {
        if (!error) error = failing(k, e);
      }
    }
    if (error) throw *error;
  } else {
    for (std::size_t k = 0; k < configs.size(); ++k) {
      try {
        results[k] = run_member(configs[k], options.lattice_times);
      } catch (const std::exception& e) {
        throw failing(k, e);
      }
    }
  }

  for (auto& r : results) rep.members.push_back(r.summary);
  for (std::size_t k = 0; k + 1 < results.size(); ++k) {
    const auto& a = results[k].lattice;
    const auto& b = results[k + 1].lattice;
    PairwiseDifference d;
    d.eps_coarse = eps_list[k];
    d.eps_fine = eps_list[k + 1];
    double su = 0.0, sv = 0.0;
    for (std::size_t j = 0; j < a.u.size(); ++j) {
      double tu = 0.0, tv = 0.0;
      for (std::size_t m = 0; m < a.u[j].size(); ++m) {
        const double du = a.u[j][m] - b.u[j][m];
        const double dv = a.v[j][m] - b.v[j][m];
        tu += a.node_weight[m] * du * du;
        tv += a.node_weight[m] * dv * dv;
        d.u_sup = std::max(d.u_sup, std::abs(du));
      }
      su += a.time_weight[j] * tu;
      sv += a.time_weight[j] * tv;
    }
    d.u_l2 = std::sqrt(su);
    d.v_l2 = std::sqrt(sv);
    d.velocity_gap = std::abs(rep.members[k].velocity_norm - rep.members[k + 1].velocity_norm);
    rep.pairs.push_back(d);
  }

  std::vector<double> viol, pe, pu, ps;
  for (const auto& m : rep.members) viol.push_back(m.violation_l2);
  for (const auto& p : rep.pairs) {
    pe.push_back(p.eps_coarse);
    pu.push_back(p.u_l2);
    ps.push_back(p.u_sup);
  }
  rep.violation_rate = fit_loglog(eps_list, viol);
  rep.u_l2_rate = fit_loglog(pe, pu);
  rep.u_sup_rate = fit_loglog(pe, ps);
  return rep;
}

double dalembert_error(const Trajectory& traj) {
  if (traj.config.law.kind != LawKind::Linear) throw DomainError("the d'Alembert oracle needs the linear law");
  const auto spec = free_wave_of(traj.config.initial);
  const Grid grid = traj.grid();
  const State& last = traj.records.back();
  double err = 0.0;
  for (std::size_t i = 0; i < grid.cells; ++i)
    err = std::max(err, std::abs(last.u[i] - oracle::dalembert(spec, grid.x(i), last.t)));
  return err;
}

RefinementReport refinement_study(const SimConfig& base, const std::vector<std::size_t>& n_list) {
  if (n_list.size() < 3) throw DomainError("a refinement study needs at least three grids");
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] != 2 * n_list[k - 1]) throw DomainError("refinement grids must double");

  RefinementReport rep;
  rep.base = base;
  rep.cells = n_list;

  const auto& init = base.initial;
  if (base.law.kind == LawKind::Linear && (init.kind == InitialKind::Bump || init.kind == InitialKind::TwoBump ||
                                           init.kind == InitialKind::Constant))
    rep.has_exact = !oracle::first_contact_time(free_wave_of(init), base.mode, base.horizon).has_value();

  // Final state and, when available, the exact error; the trajectory itself is dropped.
  std::vector<std::future<std::pair<State, double>>> futures;
  for (std::size_t n : n_list) {
    SimConfig cfg = base;
    cfg.cells = n;
    cfg.record_stride = std::size_t(1) << 40;
    cfg.validate();
    futures.push_back(std::async(std::launch::async, [cfg, exact = rep.has_exact] {
      const Trajectory traj = run(cfg);
      return std::make_pair(traj.records.back(), exact ? dalembert_error(traj) : kNaN);
    }));
  }
  std::vector<State> finals;
  for (auto& f : futures) {
    auto [state, err] = f.get();
    finals.push_back(std::move(state));
    if (rep.has_exact) rep.exact_linf.push_back(err);
  }

  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    const double dx = 2.0 * base.half_width / double(n_list[k]);
    rep.u_self.push_back(l2_on_coarse(finals[k].u, finals[k + 1].u, dx));
    rep.v_self.push_back(l2_on_coarse(finals[k].v, finals[k + 1].v, dx));
  }
  const auto orders = [](const std::vector<double>& e) {
    std::vector<double> o;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) o.push_back(std::log2(e[k] / e[k + 1]));
    return o;
  };
  rep.u_self_orders = orders(rep.u_self);
  rep.v_self_orders = orders(rep.v_self);
  if (rep.has_exact) {
    rep.exact_orders = orders(rep.exact_linf);
    std::vector<double> dx;
    for (std::size_t n : n_list) dx.push_back(2.0 * base.half_width / double(n));
    rep.exact_fit = fit_loglog(dx, rep.exact_linf);
  }
  return rep;
}

std::string sweep_csv(const SweepReport& rep, const std::string& effective_config) {
  std::ostringstream os;
  os << config_echo(effective_config);
  os << "quantity,epsilon,epsilon_fine,value\n";
  const auto row = [&](const std::string& q, double e, double e2, double v) {
    os << q << "," << fmt(e) << "," << fmt(e2) << "," << fmt(v) << "\n";
  };
  for (const auto& m : rep.members) {
    for (const auto& r : m.report.rows) row(r.diagnostic, m.epsilon, kNaN, r.value);
    row("steps", m.epsilon, kNaN, double(m.steps));
    row("initial_energy", m.epsilon, kNaN, m.initial_energy);
    row("variational_floor", m.epsilon, kNaN, m.variational_floor);
  }
  for (const auto& p : rep.pairs) {
    row("pairwise_u_l2_KT", p.eps_coarse, p.eps_fine, p.u_l2);
    row("pairwise_u_sup_KT", p.eps_coarse, p.eps_fine, p.u_sup);
    row("pairwise_v_l2_KT", p.eps_coarse, p.eps_fine, p.v_l2);
    row("velocity_norm_gap", p.eps_coarse, p.eps_fine, p.velocity_gap);
  }
  const auto fit = [&](const std::string& q, const RateFit& f) {
    row(q + "_slope", kNaN, kNaN, f.slope);
    row(q + "_r2", kNaN, kNaN, f.r2);
  };
  fit("rate_violation_l2", rep.violation_rate);
  fit("rate_pairwise_u_l2", rep.u_l2_rate);
  fit("rate_pairwise_u_sup", rep.u_sup_rate);
  return os.str();
}

std::string refinement_csv(const RefinementReport& rep, const std::string& effective_config) {
  std::ostringstream os;
  os << config_echo(effective_config);
  os << "quantity,n,n_fine,value\n";
  const auto row = [&](const std::string& q, std::size_t n, std::size_t n2, double v) {
    os << q << "," << n << "," << n2 << "," << fmt(v) << "\n";
  };
  for (std::size_t k = 0; k < rep.u_self.size(); ++k) {
    row("self_u_l2", rep.cells[k], rep.cells[k + 1], rep.u_self[k]);
    row("self_v_l2", rep.cells[k], rep.cells[k + 1], rep.v_self[k]);
  }
  for (std::size_t k = 0; k < rep.u_self_orders.size(); ++k) {
    row("self_u_order", rep.cells[k + 1], rep.cells[k + 2], rep.u_self_orders[k]);
    row("self_v_order", rep.cells[k + 1], rep.cells[k + 2], rep.v_self_orders[k]);
  }
  if (rep.has_exact) {
    for (std::size_t k = 0; k < rep.exact_linf.size(); ++k) row("exact_u_linf", rep.cells[k], 0, rep.exact_linf[k]);
    for (std::size_t k = 0; k < rep.exact_orders.size(); ++k)
      row("exact_u_order", rep.cells[k], rep.cells[k + 1], rep.exact_orders[k]);
    row("exact_fit_order", rep.cells.front(), rep.cells.back(), rep.exact_fit.slope);
    row("exact_fit_r2", rep.cells.front(), rep.cells.back(), rep.exact_fit.r2);
  }
  return os.str();
}

}  // namespace obstacle

#include "obstacle/errors.hpp"
#include "obstacle/harness.hpp"
#include "obstacle/oracle.hpp"
#include "obstacle/snapshot.hpp"
#include "obstacle/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

using namespace obstacle;

namespace {

SimConfig base_config() {
  SimConfig c;
  c.half_width = 8.0;
  c.cells = 1024;
  c.horizon = 1.0;
  c.epsilon = 1e-2;
  c.initial.first = BumpSpec{1.0, 0.0, 1.0, -2.0};
  return c;
}

// Linear string that never reaches the obstacle before T = 1.
SimConfig precontact(std::size_t cells) {
  SimConfig c = base_config();
  c.cells = cells;
  c.epsilon_visc = 1e-8;
  c.epsilon_pen = 1.0;
  c.initial.first = BumpSpec{1.0, 0.0, 1.0, 0.5};
  c.initial.offset = 1.0;
  return c;
}

double sum(const std::vector<double>& f) { return std::accumulate(f.begin(), f.end(), 0.0); }

// One midpoint step of w_t = D0 v, v_t = D0 sigma(w) - F(u) + eps D+D- v, u_t = v,
// written out node by node for the linear law and one obstacle.
State reference_step(const State& s, double dx, double eps, double dt) {
  const std::size_t n = s.size();
  const auto at = [n](long i) { return std::size_t((i % long(n) + long(n)) % long(n)); };
  const auto force = [eps](double u) { return u < 0.0 ? u / eps : 0.0; };
  const auto rhs = [&](const State& q, std::vector<double>& du, std::vector<double>& dw, std::vector<double>& dv) {
    for (long i = 0; i < long(n); ++i) {
      const double vp = q.v[at(i + 1)], vm = q.v[at(i - 1)], vc = q.v[at(i)];
      du[at(i)] = vc;
      dw[at(i)] = (vp - vm) / (2 * dx);
      dv[at(i)] = (q.w[at(i + 1)] - q.w[at(i - 1)]) / (2 * dx) - force(q.u[at(i)]) +
                  eps * (vp - 2 * vc + vm) / (dx * dx);
    }
  };
  std::vector<double> du(n), dw(n), dv(n);
  rhs(s, du, dw, dv);
  State h = s;
  for (std::size_t i = 0; i < n; ++i) {
    h.u[i] += 0.5 * dt * du[i];
    h.w[i] += 0.5 * dt * dw[i];
    h.v[i] += 0.5 * dt * dv[i];
  }
  rhs(h, du, dw, dv);
  State out = s;
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] += dt * du[i];
    out.w[i] += dt * dw[i];
    out.v[i] += dt * dv[i];
  }
  out.t += dt;
  return out;
}

}  // namespace

TEST_CASE("constant initial data") {
  SimConfig c = base_config();
  c.initial.kind = InitialKind::Constant;
  c.initial.offset = 1.0;
  const State s = initialize(c);
  REQUIRE(s.size() == c.cells);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.u[i] == 1.0);
    CHECK(s.w[i] == 0.0);
    CHECK(s.v[i] == 0.0);
  }
}

TEST_CASE("unmollified bump samples the profile") {
  SimConfig c = base_config();
  c.initial.mollify_cells = 0.0;
  c.initial.first.velocity = 0.0;
  const State s = initialize(c);
  CHECK(*std::min_element(s.u.begin(), s.u.end()) == 0.0);
  CHECK(*std::max_element(s.u.begin(), s.u.end()) == 1.0);
  CHECK(consistency_w_vs_ux(s, c.half_width * 2 / c.cells) <= 1e-14);
}

TEST_CASE("mollified data stays admissible and consistent") {
  SimConfig c = base_config();
  c.mode = ObstacleMode::Two;
  c.initial.first = BumpSpec{1.5, 0.0, 1.0, 0.0};
  const State s = initialize(c);
  for (double u : s.u) {
    CHECK(u <= 1.0);
    CHECK(u >= -1.0);
  }
  CHECK(consistency_w_vs_ux(s, 16.0 / 1024) <= 1e-14);
}

TEST_CASE("bump must sit inside the central half") {
  SimConfig c = base_config();
  c.initial.first.center = 3.5;
  try {
    initialize(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "center");
  }
}

TEST_CASE("time step bounds") {
  SimConfig c = base_config();
  c.cells = 1600;  // dx = 0.01
  c.initial.kind = InitialKind::Constant;
  Solver solver(c);
  const State s = solver.initialize();
  // min(dx / 1, dx^2 / (2 eps), eps) = 0.005, times theta = 0.5.
  CHECK(solver.compute_dt(s) == doctest::Approx(0.0025).epsilon(1e-14));

  SimConfig p = c;
  p.law.kind = LawKind::Power;
  p.epsilon_visc = 1e-3;
  p.epsilon_pen = 1.0;
  Solver cubic(p);
  State flat = cubic.initialize();
  CHECK(cubic.compute_dt(flat) == doctest::Approx(0.005).epsilon(1e-14));
  flat.w.assign(flat.size(), 0.0);
  flat.w[7] = 2.0;
  CHECK(cubic.wave_speed(flat) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-15));
  flat.w[9] = std::nan("");
  CHECK_THROWS_AS(cubic.compute_dt(flat), NumericError);

  SimConfig semi = c;
  semi.scheme = Scheme::SemiImplicitPenalty;
  semi.epsilon_pen = 1e-6;
  semi.epsilon_visc = 1e-3;
  CHECK(compute_dt(initialize(semi), semi) == doctest::Approx(0.005).epsilon(1e-14));
}

TEST_CASE("stationary state does not move") {
  SimConfig c = base_config();
  c.initial.kind = InitialKind::Constant;
  c.initial.offset = 0.5;
  const State s = initialize(c);
  const State next = step(s, c, 0.003);
  CHECK(next.u == s.u);
  CHECK(next.w == s.w);
  CHECK(next.v == s.v);
  CHECK(next.t == doctest::Approx(0.003));
}

TEST_CASE("momentum is conserved while the penalty is inactive") {
  SimConfig c = precontact(512);
  Solver solver(c);
  State s = solver.initialize();
  const double m0 = sum(s.v);
  const double dt = solver.compute_dt(s);
  for (int k = 0; k < 50; ++k) solver.step(s, dt);
  CHECK(std::abs(sum(s.v) - m0) <= 1e-12 * double(c.cells));
}

TEST_CASE("one step matches a node-by-node reference") {
  SimConfig c = base_config();
  c.half_width = 1.0;
  c.cells = 16;
  c.epsilon = 0.1;
  c.horizon = 0.1;
  c.diagnostics.window_lo = -0.5;
  c.diagnostics.window_hi = 0.5;
  c.initial.kind = InitialKind::Constant;
  Solver solver(c);
  State s = solver.initialize();
  s.u[5] = -0.1;
  const double dx = c.half_width * 2 / double(c.cells);
  for (std::size_t i = 0; i < s.size(); ++i) s.w[i] = (s.u[(i + 1) % 16] - s.u[(i + 15) % 16]) / (2 * dx);
  const double dt = 1e-3;
  const State expected = reference_step(s, dx, c.epsilon, dt);
  State got = s;
  solver.step(got, dt);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(got.u[i] - expected.u[i]) <= 1e-12);
    CHECK(std::abs(got.w[i] - expected.w[i]) <= 1e-12);
    CHECK(std::abs(got.v[i] - expected.v[i]) <= 1e-12);
  }
  // The node below the obstacle is pushed up.
  CHECK(got.v[5] > 0.0);
}

TEST_CASE("non-finite values raise a blow-up error with the step index") {
  SimConfig c = base_config();
  c.law.kind = LawKind::Power;
  c.initial.kind = InitialKind::Constant;
  Solver solver(c);
  State s = solver.initialize();
  s.w[3] = 1e120;
  try {
    solver.step(s, 1e-3, 17);
    FAIL("expected a BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 17);
  }
  State bad = solver.initialize();
  bad.v.pop_back();
  CHECK_THROWS_AS(solver.step(bad, 1e-3), DomainError);
  CHECK_THROWS_AS(solver.step(s, 0.0), DomainError);
}

TEST_CASE("invalid configuration is rejected on construction") {
  SimConfig c = base_config();
  c.law.kind = LawKind::Power;
  c.law.exponent = 4;
  try {
    Solver s(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "exponent");
  }
  SimConfig odd = base_config();
  odd.cells = 1023;
  CHECK_THROWS_AS(Solver{odd}, ConfigError);
}

TEST_CASE("wrap guard") {
  SimConfig c = base_config();
  c.horizon = 5.0;
  try {
    run(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "half_width");
    CHECK(std::string(e.what()).find("half_width >=") != std::string::npos);
  }
}

TEST_CASE("stationary run keeps every record") {
  SimConfig c = base_config();
  c.cells = 128;
  c.initial.kind = InitialKind::Constant;
  c.initial.offset = 0.25;
  const Trajectory tr = run(c);
  CHECK(tr.records.back().t == 1.0);
  for (const auto& r : tr.records) {
    CHECK(r.u == tr.records.front().u);
    CHECK(r.v == tr.records.front().v);
  }
}

TEST_CASE("reference run: energy, drift, momentum and penalty bounds") {
  const SimConfig c = base_config();
  const Trajectory tr = run(c);
  const double e0 = tr.energy.front().total();
  double residual = 0.0, drift = 0.0, penalty = 0.0;
  for (std::size_t m = 0; m < tr.records.size(); ++m) {
    residual = std::max(residual, std::abs(tr.energy[m].total() + tr.dissipation[m] - e0) / e0);
    drift = std::max(drift, consistency_w_vs_ux(tr.records[m], tr.grid().dx()));
    penalty = std::max(penalty, tr.energy[m].penalty);
    if (m > 0) {
      CHECK(tr.energy[m].total() <= tr.energy[m - 1].total() * (1.0 + 1e-3));
      // One obstacle: the penalty pushes up, so total momentum never decreases.
      CHECK(sum(tr.records[m].v) >= sum(tr.records[m - 1].v) - 1e-12 * double(c.cells));
    }
  }
  CHECK(residual <= 1e-3);
  CHECK(drift <= 1e-8);
  CHECK(penalty <= e0);
  CHECK(tr.records.back().t == 1.0);

  SimConfig half = c;
  half.cfl = 0.25;
  const Trajectory tr2 = run(half);
  double residual2 = 0.0;
  for (std::size_t m = 0; m < tr2.records.size(); ++m)
    residual2 = std::max(residual2, std::abs(tr2.energy[m].total() + tr2.dissipation[m] - e0) / e0);
  CHECK(residual2 <= 0.5 * residual);
}

TEST_CASE("runs are deterministic") {
  SimConfig c = base_config();
  c.cells = 256;
  c.record_stride = 5;
  const Trajectory a = run(c), b = run(c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t m = 0; m < a.records.size(); ++m) CHECK(a.records[m] == b.records[m]);
  CHECK(a.dissipation == b.dissipation);
}

TEST_CASE("semi-implicit scheme stays admissible with a stiff penalty") {
  SimConfig c = base_config();
  c.scheme = Scheme::SemiImplicitPenalty;
  c.epsilon_pen = 1e-8;
  c.epsilon_visc = 1e-2;
  const Trajectory tr = run(c);
  double worst = 0.0;
  for (double u : tr.records.back().u) worst = std::max(worst, -u);
  CHECK(worst <= 1e-6);
  const double e0 = tr.energy.front().total();
  CHECK(tr.energy.back().total() + tr.dissipation.back() <= e0 * 1.01);
}

TEST_CASE("linear string converges to d'Alembert before contact") {
  std::vector<double> err;
  for (std::size_t n : {512, 1024, 2048}) {
    SimConfig c = precontact(n);
    c.record_stride = 1u << 30;
    err.push_back(dalembert_error(run(c)));
  }
  CHECK(err[2] <= 5e-3);
  CHECK(err[0] / err[1] >= 3.0);
  CHECK(err[1] / err[2] >= 3.0);
}

TEST_CASE("initial data from a snapshot file") {
  const auto dir = std::filesystem::temp_directory_path() / "obstacle_test_solver";
  std::filesystem::create_directories(dir);
  SimConfig src = base_config();
  src.cells = 256;
  const State s0 = initialize(src);
  Snapshot snap;
  snap.half_width = src.half_width;
  snap.epsilon = src.epsilon;
  snap.state = s0;
  const auto path = (dir / "init.obs").string();
  write_snapshot(path, snap);

  SimConfig c = src;
  c.initial.kind = InitialKind::File;
  c.initial.file = path;
  const State s = initialize(c);
  CHECK(s.u == s0.u);
  CHECK(s.v == s0.v);

  SimConfig wrong = c;
  wrong.cells = 128;
  CHECK_THROWS_AS(initialize(wrong), ConfigError);
  std::filesystem::remove_all(dir);
}

#include "obstacle/config_io.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/harness.hpp"
#include "obstacle/snapshot.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace obstacle;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = "[domain]\nhorizon = 1\n[penalty]\nepsilon = 0.01\n";

SimConfig stationary() {
  SimConfig c;
  c.cells = 256;
  c.horizon = 0.5;
  c.initial.kind = InitialKind::Constant;
  c.initial.offset = 0.5;
  return c;
}

SimConfig small_contact() {
  SimConfig c;
  c.cells = 256;
  c.horizon = 0.8;
  c.record_stride = 4;
  c.initial.first = BumpSpec{1.0, 0.0, 1.0, -2.0};
  return c;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("obstacle_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

template <class F>
ConfigError config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("");
}

}  // namespace

TEST_CASE("minimal configuration takes the defaults") {
  const SimConfig c = parse_config(kMinimal);
  SimConfig expected;
  expected.horizon = 1.0;
  expected.epsilon = 0.01;
  CHECK(c == expected);
  CHECK(c.eps_visc() == 0.01);
  CHECK_FALSE(c.decoupled());
}

TEST_CASE("configuration round trip") {
  SimConfig c;
  c.half_width = 12.5;
  c.cells = 2048;
  c.horizon = 0.7;
  c.epsilon = 3e-3;
  c.epsilon_pen = 1e-5;
  c.mode = ObstacleMode::Two;
  c.law.kind = LawKind::Power;
  c.law.exponent = 5;
  c.scheme = Scheme::SemiImplicitPenalty;
  c.cfl = 0.3;
  c.record_stride = 7;
  c.initial.kind = InitialKind::TwoBump;
  c.initial.first = BumpSpec{0.1, -1.5, 0.75, 3.0};
  c.initial.second = BumpSpec{0.0, 1.5, 1.0, -3.0};
  c.initial.mollify_cells = 2.5;
  c.diagnostics.sweep_eps = {0.2, 0.02, 0.002};
  c.diagnostics.refine_cells = {256, 512, 1024, 2048};
  c.diagnostics.seed = 99;
  CHECK(parse_config(emit_config(c)) == c);
  CHECK(emit_config(parse_config(emit_config(c))) == emit_config(c));
}

TEST_CASE("configuration errors name the key") {
  auto e = config_error([] { parse_config("[domain]\nhorizon = 1\n[penalty]\nepsilon = -1\n"); });
  CHECK(e.key() == "epsilon");
  e = config_error([] { parse_config("[domain]\nhorizon = 1\nspan = 3\n[penalty]\nepsilon = 0.1\n"); });
  CHECK(e.key() == "span");
  CHECK(e.line() == 3);
  e = config_error([] { parse_config("[domain]\nhorizon = 1\n"); });
  CHECK(e.key() == "epsilon");
  e = config_error([] { parse_config("[domain]\nhorizon = soon\n[penalty]\nepsilon = 0.1\n"); });
  CHECK(e.key() == "horizon");
  CHECK(e.line() == 2);
  e = config_error([] { parse_config("[physics]\nmass = 1\n"); });
  CHECK(e.line() == 1);
  e = config_error([] { parse_config(std::string(kMinimal) + "[domain]\ncells = 1001\n"); });
  CHECK(e.key() == "cells");
  e = config_error([] { parse_config(std::string(kMinimal) + "[law]\nkind = power\nexponent = 4\n"); });
  CHECK(e.key() == "exponent");
  e = config_error([] { load_config("/nonexistent/config.cfg"); });
}

TEST_CASE("snapshot encoding") {
  Snapshot s;
  s.mode = ObstacleMode::Two;
  s.half_width = 8.0;
  s.epsilon = 1e-3;
  s.state.t = 0.125;
  s.state.u = {0.1, -0.2, std::nextafter(0.3, 1.0), 1e-300};
  s.state.w = {1.0, 2.0, 3.0, -4.0};
  s.state.v = {-0.0, 5.0, 6.0, 7.0};
  auto bytes = encode_snapshot(s);
  const Snapshot back = decode_snapshot(bytes);
  CHECK(back.state == s.state);
  CHECK(back.mode == s.mode);
  CHECK(back.half_width == s.half_width);
  CHECK(back.epsilon == s.epsilon);
  CHECK(std::signbit(back.state.v[0]));

  auto flipped = bytes;
  flipped[40] ^= 0x10;
  CHECK_THROWS_WITH_AS(decode_snapshot(flipped), "snapshot CRC mismatch", FormatError);
  auto old = bytes;
  old[4] = 0;
  old[5] = 0;
  CHECK_THROWS_AS(decode_snapshot(old), FormatError);
  auto cut = bytes;
  cut.resize(bytes.size() - 9);
  CHECK_THROWS_AS(decode_snapshot(cut), FormatError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(magic), FormatError);
  CHECK(crc32_of("123456789", 9) == 0xCBF43926u);
}

TEST_CASE("trajectory export and import are bit-exact") {
  const auto dir = scratch("traj");
  const Trajectory tr = run(small_contact());
  export_trajectory(tr, (dir / "run").string());
  const Trajectory back = import_trajectory((dir / "run").string());
  CHECK(back.config == tr.config);
  REQUIRE(back.records.size() == tr.records.size());
  for (std::size_t m = 0; m < tr.records.size(); ++m) CHECK(back.records[m] == tr.records[m]);
  CHECK(back.dissipation == tr.dissipation);
  CHECK(back.energy.back().total() == tr.energy.back().total());

  // A tampered configuration no longer matches the manifest hash.
  std::ofstream(dir / "run" / "effective.cfg", std::ios::app) << "# edited\n";
  CHECK_THROWS_AS(import_trajectory((dir / "run").string()), FormatError);
  CHECK_THROWS_AS(import_trajectory((dir / "missing").string()), FormatError);
  fs::remove_all(dir);
}

TEST_CASE("log-log fit") {
  const std::vector<double> x{1.0, 0.1, 0.01, 0.001};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.5));
  const auto fit = fit_loglog(x, y);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 4);
  const auto partial = fit_loglog({1.0, 0.1, 0.01}, {0.0, 2.0, -1.0});
  CHECK(partial.points == 1);
  CHECK(std::isnan(partial.slope));
}

TEST_CASE("epsilon sweep of a stationary state") {
  const auto rep = eps_sweep(stationary(), {1e-1, 1e-2, 1e-3});
  REQUIRE(rep.members.size() == 3);
  REQUIRE(rep.pairs.size() == 2);
  for (const auto& p : rep.pairs) {
    CHECK(p.u_l2 == 0.0);
    CHECK(p.u_sup == 0.0);
    CHECK(p.velocity_gap == 0.0);
  }
  for (const auto& m : rep.members) CHECK(m.report.all_pass());
  CHECK_THROWS_AS(eps_sweep(stationary(), {1e-2, 1e-1, 1e-3}), DomainError);
  CHECK_THROWS_AS(eps_sweep(stationary(), {1e-1, 1e-2}), DomainError);
}

TEST_CASE("sweeps are deterministic and scale decoupled parameters") {
  SimConfig c = small_contact();
  c.epsilon_visc = 2e-2;
  const SimConfig scaled = with_epsilon(c, 1e-3);
  CHECK(scaled.epsilon == 1e-3);
  CHECK(scaled.eps_visc() == doctest::Approx(2e-3).epsilon(1e-14));
  CHECK(scaled.eps_pen() == 1e-3);

  const std::vector<double> list{1e-1, 3e-2, 1e-2};
  const auto a = eps_sweep(c, list);
  const auto b = eps_sweep(c, list, SweepOptions{201, false});
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    CHECK(a.pairs[k].u_l2 == b.pairs[k].u_l2);
    CHECK(a.pairs[k].u_sup == b.pairs[k].u_sup);
  }
  for (std::size_t k = 0; k < a.members.size(); ++k) CHECK(a.members[k].penalty_l1 == b.members[k].penalty_l1);
  const std::string csv = sweep_csv(a, emit_config(c));
  CHECK(csv.find("quantity,epsilon,epsilon_fine,value") != std::string::npos);
}

TEST_CASE("a failing sweep member names its epsilon") {
  SimConfig c = small_contact();
  c.half_width = 2.0;
  c.cells = 64;
  c.initial.first.width = 0.4;
  c.diagnostics.window_lo = -0.5;
  c.diagnostics.window_hi = 0.5;
  c.horizon = 3.0;
  try {
    eps_sweep(c, {1e-1, 1e-2, 1e-3});
    FAIL("expected the sweep to fail");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("eps=") != std::string::npos);
  }
}

TEST_CASE("refinement of a stationary state") {
  const auto rep = refinement_study(stationary(), {128, 256, 512});
  for (double d : rep.u_self) CHECK(d == 0.0);
  for (double d : rep.v_self) CHECK(d == 0.0);
  CHECK_THROWS_AS(refinement_study(stationary(), {128, 256, 1024}), DomainError);
  CHECK_THROWS_AS(refinement_study(stationary(), {128, 256}), DomainError);
}

TEST_CASE("refinement against d'Alembert before contact") {
  SimConfig c;
  c.epsilon_visc = 1e-8;
  c.epsilon_pen = 1.0;
  c.initial.offset = 1.0;
  c.initial.first = BumpSpec{1.0, 0.0, 1.0, 0.5};
  const auto rep = refinement_study(c, {512, 1024, 2048});
  REQUIRE(rep.has_exact);
  for (double o : rep.exact_orders) CHECK(o >= 1.8);
  CHECK(rep.exact_fit.slope >= 1.8);
  CHECK(refinement_csv(rep, emit_config(c)).find("quantity,n,n_fine,value") != std::string::npos);
}

TEST_CASE("self-convergence of a smooth quasilinear solution") {
  SimConfig c;
  c.horizon = 0.3;
  c.law.kind = LawKind::Power;
  c.epsilon_visc = 1e-6;
  c.epsilon_pen = 1.0;
  c.initial.offset = 1.0;
  c.initial.first = BumpSpec{0.3, 0.0, 1.0, 0.2};
  const auto rep = refinement_study(c, {256, 512, 1024, 2048});
  CHECK_FALSE(rep.has_exact);
  for (double o : rep.u_self_orders) CHECK(o >= 1.5);
}

#include "obstacle/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace obstacle;

namespace {

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double a = 1.0 - s * s;
  return a * a * a;
}

oracle::FreeWaveSpec pulse(double amplitude, double velocity) {
  oracle::FreeWaveSpec spec;
  spec.u0 = [=](double x) { return amplitude * bump(x); };
  spec.v0 = [=](double x) { return velocity * bump(x); };
  return spec;
}

}  // namespace

TEST_CASE("brute quadrature examples") {
  CHECK(oracle::brute_quadrature([](double s) { return s + s * s * s; }, 0.0, 2.0) ==
        doctest::Approx(6.0).epsilon(1e-13));
  CHECK(oracle::brute_quadrature([](double s) { return std::sin(s); }, 0.0, M_PI, 1000) ==
        doctest::Approx(2.0).epsilon(1e-11));
  CHECK_THROWS(oracle::brute_quadrature([](double) { return 1.0; }, 1.0, 0.0));
}

TEST_CASE("d'Alembert formula with zero velocity splits the pulse") {
  const auto spec = pulse(1.0, 0.0);
  for (double x : {-2.0, -0.3, 0.0, 0.45, 1.7})
    for (double t : {0.0, 0.25, 1.0, 2.5})
      CHECK(oracle::dalembert(spec, x, t) == doctest::Approx(0.5 * (bump(x - t) + bump(x + t))).epsilon(1e-14));
}

TEST_CASE("d'Alembert formula: initial data and finite propagation") {
  const auto spec = pulse(0.7, -1.3);
  for (double x : {-0.9, -0.2, 0.0, 0.6}) {
    CHECK(oracle::dalembert(spec, x, 0.0) == doctest::Approx(0.7 * bump(x)).epsilon(1e-15));
    const double h = 1e-4;
    const double vt = (-3.0 * oracle::dalembert(spec, x, 0.0) + 4.0 * oracle::dalembert(spec, x, h) -
                       oracle::dalembert(spec, x, 2 * h)) / (2 * h);
    CHECK(std::abs(vt + 1.3 * bump(x)) <= 1e-6);
  }
  CHECK(oracle::dalembert(spec, 3.5, 2.0) == 0.0);
  CHECK(oracle::dalembert(spec, -5.0, 1.0) == 0.0);
}

TEST_CASE("d'Alembert solution solves the discrete wave equation") {
  const auto spec = pulse(1.0, 0.5);
  const double h = 1e-3;
  double worst = 0.0;
  for (double x = -2.0; x <= 2.0; x += 0.11)
    for (double t : {0.3, 0.8}) {
      const auto u = [&](double a, double b) { return oracle::dalembert(spec, a, b); };
      const double r = (u(x, t + h) - 2 * u(x, t) + u(x, t - h)) - (u(x + h, t) - 2 * u(x, t) + u(x - h, t));
      worst = std::max(worst, std::abs(r) / (h * h));
    }
  CHECK(worst <= 1e-3);
}

TEST_CASE("first contact time") {
  // Resting at height one with no velocity: never touches.
  oracle::FreeWaveSpec rest;
  rest.u0 = [](double) { return 1.0; };
  rest.v0 = [](double) { return 0.0; };
  rest.far_field = 1.0;
  CHECK_FALSE(oracle::first_contact_time(rest, ObstacleMode::One, 2.0).has_value());

  // u0 = 0.1 everywhere, v0 = -1 on [-1, 1]: u(0, t) = 0.1 - t until t = 1.
  oracle::FreeWaveSpec fall;
  fall.u0 = [](double) { return 0.1; };
  fall.v0 = [](double x) { return std::abs(x) <= 1.0 ? -1.0 : 0.0; };
  fall.far_field = 0.1;
  const auto tc = oracle::first_contact_time(fall, ObstacleMode::One, 1.0);
  REQUIRE(tc.has_value());
  CHECK(std::abs(*tc - 0.1) <= 1e-6);

  // Small velocity between two obstacles stays inside.
  const auto small = pulse(0.0, 0.2);
  CHECK_FALSE(oracle::first_contact_time(small, ObstacleMode::Two, 3.0).has_value());

  // Downward pulse from zero height touches immediately.
  const auto down = pulse(0.0, -1.0);
  const auto t0 = oracle::first_contact_time(down, ObstacleMode::One, 1.0);
  REQUIRE(t0.has_value());
  CHECK(*t0 <= 1e-6);
}

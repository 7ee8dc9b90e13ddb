#include "obstacle/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace obstacle::oracle {

namespace {

double excess(double u, ObstacleMode mode) {
  if (mode == ObstacleMode::One) return -u;
  return std::max(u - 1.0, -1.0 - u);
}

// Largest constraint excess of the free solution at time t (positive = violated).
double worst_excess(const FreeWaveSpec& spec, ObstacleMode mode, double t) {
  const double lo = spec.support_lo - t;
  const double hi = spec.support_hi + t;
  constexpr int kSamples = 1601;
  double worst = excess(spec.far_field, mode);
  double best_x = lo;
  for (int i = 0; i < kSamples; ++i) {
    const double x = lo + (hi - lo) * i / (kSamples - 1);
    const double e = excess(dalembert(spec, x, t), mode);
    if (e > worst) {
      worst = e;
      best_x = x;
    }
  }
  // Golden-section polish around the best sample.
  double a = best_x - (hi - lo) / (kSamples - 1);
  double b = best_x + (hi - lo) / (kSamples - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (excess(dalembert(spec, c, t), mode) > excess(dalembert(spec, d, t), mode)) b = d;
    else a = c;
  }
  return std::max(worst, excess(dalembert(spec, 0.5 * (a + b), t), mode));
}

}  // namespace

double dalembert(const FreeWaveSpec& spec, double x, double t) {
  const double left = x - t;
  const double right = x + t;
  double u = 0.5 * (spec.u0(left) + spec.u0(right));
  const double a = std::max(left, spec.support_lo);
  const double b = std::min(right, spec.support_hi);
  if (b > a) {
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    // The relative tolerance is unreachable for integrals near zero, so accept
    // a single pass once its error estimate is negligible in absolute terms.
    double error = 0.0;
    double integral = gk::integrate(spec.v0, a, b, 0, 0.0, &error);
    if (error > 1e-15) integral = gk::integrate(spec.v0, a, b, 10, 1e-12, &error);
    u += 0.5 * integral;
  }
  return u;
}

std::optional<double> first_contact_time(const FreeWaveSpec& spec, ObstacleMode mode, double horizon) {
  constexpr int kScan = 400;
  constexpr double kTol = 0.0;
  double prev = 0.0;
  if (worst_excess(spec, mode, 0.0) > kTol) return 0.0;
  for (int k = 1; k <= kScan; ++k) {
    const double t = horizon * k / kScan;
    if (worst_excess(spec, mode, t) > kTol) {
      double lo = prev, hi = t;
      while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        if (worst_excess(spec, mode, mid) > kTol) hi = mid;
        else lo = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = t;
  }
  return std::nullopt;
}

double brute_quadrature(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (!(b > a)) throw std::domain_error("brute_quadrature needs a < b");
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / double(panels);
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < panels; ++i) {
    const double v = f(a + h * double(i));
    if (i % 2) odd += v;
    else even += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

}  // namespace obstacle::oracle

#include "obstacle/penalty.hpp"

#include "obstacle/errors.hpp"

#include <algorithm>
#include <cmath>

namespace obstacle {

namespace {

inline double pos(double z) { return z > 0.0 ? z : 0.0; }
inline double neg(double z) { return z < 0.0 ? -z : 0.0; }

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("penalty parameter must be positive and finite");
}

}  // namespace

const char* to_string(ObstacleMode mode) { return mode == ObstacleMode::One ? "one" : "two"; }

ObstacleMode parse_mode(const std::string& text) {
  if (text == "one" || text == "1") return ObstacleMode::One;
  if (text == "two" || text == "2") return ObstacleMode::Two;
  throw DomainError("unknown obstacle mode '" + text + "' (expected 'one' or 'two')");
}

double penalty_force(double u, double eps, ObstacleMode mode) {
  require_eps(eps);
  // Written as (1/eps) * F_1(u) so the scaling in eps is exact.
  const double inv = 1.0 / eps;
  if (mode == ObstacleMode::One) return inv * -neg(u);
  return inv * -(neg(u + 1.0) - pos(u - 1.0));
}

double penalty_potential(double u, double eps, ObstacleMode mode) {
  require_eps(eps);
  if (mode == ObstacleMode::One) {
    const double m = neg(u);
    return m * m / (2.0 * eps);
  }
  const double a = pos(u - 1.0);
  const double b = neg(u + 1.0);
  return (a * a + b * b) / (2.0 * eps);
}

double constraint_excess(double u, ObstacleMode mode) {
  if (mode == ObstacleMode::One) return neg(u);
  return pos(u - 1.0) + neg(u + 1.0);
}

double project_admissible(double u, ObstacleMode mode) {
  if (mode == ObstacleMode::One) return std::max(u, 0.0);
  return std::clamp(u, -1.0, 1.0);
}

double solve_implicit_penalty(double b, double dt2, double eps, ObstacleMode mode) {
  require_eps(eps);
  const double stiff = 1.0 + dt2 / eps;
  if (mode == ObstacleMode::One) return b >= 0.0 ? b : b / stiff;
  if (b > 1.0) return 1.0 + (b - 1.0) / stiff;
  if (b < -1.0) return -1.0 + (b + 1.0) / stiff;
  return b;
}

}  // namespace obstacle

#pragma once

#include <string>

namespace obstacle {

/// Which constraint the string is subject to: u >= 0, or -1 <= u <= 1.
enum class ObstacleMode { One, Two };

const char* to_string(ObstacleMode mode);
ObstacleMode parse_mode(const std::string& text);

/// F_eps(u): -(1/eps) u^- for one obstacle, -(1/eps)((u+1)^- - (u-1)^+) for two.
/// Enters the equation as u_tt - sigma(u_x)_x + F_eps(u) = eps u_txx, so -F_eps
/// is the restoring force. Throws DomainError for eps <= 0.
double penalty_force(double u, double eps, ObstacleMode mode);

/// Phi_eps(u), the potential with dPhi/du = F_eps(u); zero on the admissible set.
double penalty_potential(double u, double eps, ObstacleMode mode);

/// Amount by which u leaves the admissible set: u^-, or (u-1)^+ + (u+1)^-.
double constraint_excess(double u, ObstacleMode mode);

/// Projection onto the admissible set.
double project_admissible(double u, ObstacleMode mode);

/// Solves z + dt2 * F_eps(z) = b for z (the map is strictly increasing and
/// piecewise linear, so the root is closed form).
double solve_implicit_penalty(double b, double dt2, double eps, ObstacleMode mode);

}  // namespace obstacle

#pragma once

#include <cstddef>
#include <vector>

namespace obstacle {

/// Uniform periodic grid on [-R, R) with n cells; node n is identified with node 0.
struct Grid {
  double half_width = 8.0;
  std::size_t cells = 1024;

  double dx() const { return 2.0 * half_width / double(cells); }
  double x(std::size_t i) const { return -half_width + double(i) * dx(); }
  double length() const { return 2.0 * half_width; }
};

/// Displacement u, strain w (~u_x) and velocity v (= u_t) on the nodes at time t.
struct State {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> v;

  std::size_t size() const { return u.size(); }
  bool operator==(const State&) const = default;
};

/// max_i |w_i - (u_{i+1} - u_{i-1}) / (2 dx)| on the periodic grid.
double consistency_w_vs_ux(const State& state, double dx);

}  // namespace obstacle

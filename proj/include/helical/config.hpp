#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace helical {

// Parameters of the helically reduced wave equation on a ball of radius R:
// spatial dimension n of the reduced manifold, angular velocity omega of the
// helical symmetry, and the +/-1 branch of the Sommerfeld condition
// (outgoing vs. ingoing).
struct HelicalConfig {
  int n = 2;           // reduced spatial dimension, 2 or 3
  double omega = 1.0;  // angular velocity, > 0
  double R = 1.0;      // ball radius, > 0
  int sign = +1;       // Sommerfeld branch

  void validate() const {
    if (n != 2 && n != 3)
      throw std::invalid_argument("HelicalConfig: n must be 2 or 3, got " +
                                  std::to_string(n));
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw std::invalid_argument("HelicalConfig: omega must be positive");
    if (!(R > 0.0) || !std::isfinite(R))
      throw std::invalid_argument("HelicalConfig: R must be positive");
    if (sign != 1 && sign != -1)
      throw std::invalid_argument("HelicalConfig: sign must be +1 or -1");
  }

  // rho at which chi(rho) = 1 - omega^2 rho^2 changes sign
  double light_cylinder_radius() const { return 1.0 / omega; }

  // true when the boundary sphere crosses the light cylinder
  bool light_cylinder_interior() const { return omega * R > 1.0; }

  // the degenerate configuration where the boundary is tangent to the
  // light cylinder; allowed, but reports mark it as outside the theory
  bool boundary_tangent_to_light_cylinder(double tol = 1e-12) const {
    return std::abs(omega * R - 1.0) <= tol;
  }
};

inline HelicalConfig make_config(int n, double omega, double R, int sign = +1) {
  HelicalConfig c{n, omega, R, sign};
  c.validate();
  return c;
}

}  // namespace helical

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "helical/config.hpp"
#include "helical/grid.hpp"
#include "helical/modes.hpp"

namespace helical {

// One Fourier mode of the field: complex samples on the radial grid (n = 2)
// or the (r, theta) chart (n = 3).  Regularity: modes with |m| >= 1 vanish
// on the axis; m = 0 is even across it.
struct ModeField {
  int m = 0;
  Eigen::VectorXcd values;
};

// Density-weighted reduced operator applied to one mode, conservative
// second-order stencils, returned at interior nodes (axis, pole, origin and
// boundary rows carry regularity / boundary conditions instead and are zero
// here).
//
//   n = 2:  d_rho(rho u') - m^2 (chi/rho) u
//   n = 3:  on the (r, theta) chart, the same operator as a chart density
//           (the cylindrical form times the Jacobian r):
//           d_r(r^2 sin(th) u_r) + d_th(sin(th) u_th) - m^2 (chi/sin(th)) u
inline Eigen::VectorXcd mode_operator_apply(const ModeField& mode, const Grid& g,
                                            const HelicalConfig& cfg) {
  if (cfg.n != g.n)
    throw std::invalid_argument("mode_operator_apply: config/grid dimension mismatch");
  if (mode.values.size() != g.spatial_size())
    throw std::invalid_argument("mode_operator_apply: mode/grid size mismatch");
  const double m2 = static_cast<double>(mode.m) * mode.m;
  const double w2 = cfg.omega * cfg.omega;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(mode.values.size());
  const auto& u = mode.values;

  if (g.n == 2) {
    const double ih2 = 1.0 / (g.hr * g.hr);
    for (int j = 1; j < g.J; ++j) {
      const double rp = g.r[j] + 0.5 * g.hr, rm = g.r[j] - 0.5 * g.hr;
      Complex val = (rp * (u[j + 1] - u[j]) - rm * (u[j] - u[j - 1])) * ih2;
      if (mode.m != 0) {
        const double c = 1.0 - w2 * g.r[j] * g.r[j];
        val -= m2 * (c / g.r[j]) * u[j];
      }
      out[j] = val;
    }
    return out;
  }

  const double ihr2 = 1.0 / (g.hr * g.hr), iht2 = 1.0 / (g.htheta * g.htheta);
  for (int j = 1; j < g.J; ++j) {
    const double rp = g.r[j] + 0.5 * g.hr, rm = g.r[j] - 0.5 * g.hr;
    for (int k = 1; k < g.K; ++k) {
      const double st = std::sin(g.theta[k]);
      const double stp = std::sin(g.theta[k] + 0.5 * g.htheta);
      const double stm = std::sin(g.theta[k] - 0.5 * g.htheta);
      const int c = g.sidx(j, k);
      Complex val = st * (rp * rp * (u[g.sidx(j + 1, k)] - u[c]) -
                          rm * rm * (u[c] - u[g.sidx(j - 1, k)])) *
                    ihr2;
      val += (stp * (u[g.sidx(j, k + 1)] - u[c]) - stm * (u[c] - u[g.sidx(j, k - 1)])) *
             iht2;
      if (mode.m != 0) {
        const double rho = g.r[j] * st;
        val -= m2 * ((1.0 - w2 * rho * rho) / st) * u[c];
      }
      out[c] = val;
    }
  }
  return out;
}

// Sommerfeld residual per boundary node:  u_r + sign * i m omega * u - tau_m,
// with u_r the second-order one-sided radial difference.  The radial
// derivative realizes (1/R)(rho u_rho + z u_z) through the Euler identity
// rho u_rho + z u_z = r u_r.
inline Eigen::VectorXcd mode_boundary_residual(const ModeField& mode,
                                               const Eigen::Ref<const Eigen::VectorXcd>& tau_m,
                                               const Grid& g,
                                               const HelicalConfig& cfg) {
  if (cfg.n != g.n)
    throw std::invalid_argument("mode_boundary_residual: dimension mismatch");
  if (mode.values.size() != g.spatial_size())
    throw std::invalid_argument("mode_boundary_residual: mode/grid size mismatch");
  if (tau_m.size() != g.boundary_size())
    throw std::invalid_argument("mode_boundary_residual: tau length mismatch");
  const Complex rot(0.0, cfg.sign * mode.m * cfg.omega);
  const double c2 = 1.0 / (2.0 * g.hr);
  Eigen::VectorXcd out(g.boundary_size());
  const auto& u = mode.values;
  for (int k = 0; k < g.boundary_size(); ++k) {
    const Complex ur = (3.0 * u[g.sidx(g.J, k)] - 4.0 * u[g.sidx(g.J - 1, k)] +
                        u[g.sidx(g.J - 2, k)]) *
                       c2;
    out[k] = ur + rot * u[g.sidx(g.J, k)] - tau_m[k];
  }
  return out;
}

}  // namespace helical

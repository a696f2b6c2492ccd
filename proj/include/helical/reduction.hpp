#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "helical/config.hpp"

namespace helical {

// chi(rho) = 1 - omega^2 rho^2.  Positive inside the light cylinder
// (elliptic region), negative outside (hyperbolic region).
inline double chi(double rho, const HelicalConfig& cfg) {
  if (rho < 0.0 || !std::isfinite(rho))
    throw std::domain_error("chi: rho must be non-negative");
  return 1.0 - cfg.omega * cfg.omega * rho * rho;
}

enum class RegionTag { Elliptic, LightCylinder, Hyperbolic };

// Diagnostic classification against the light cylinder.  Stencils never
// branch on this: the density-weighted coefficients are smooth through
// chi = 0.
inline RegionTag classify_point(double rho, const HelicalConfig& cfg,
                                double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify_point: tol <= 0");
  const double c = chi(rho, cfg);
  if (c > tol) return RegionTag::Elliptic;
  if (c < -tol) return RegionTag::Hyperbolic;
  return RegionTag::LightCylinder;
}

// Pointwise values of the density sigma = rho and the weight-one tensor
// density h^{ab}:  h^{rho rho} = rho,  h^{zz} = rho (n = 3 only),
// h^{phi phi} = chi/rho = 1/rho - omega^2 rho.
struct CoefficientSample {
  double rho;
  double chi;
  double sigma;
  double h_rho_rho;
  double h_zz;       // meaningful only for n = 3
  double h_phi_phi;  // singular at the axis; rho > 0 required
};

inline CoefficientSample coefficients(double rho, const HelicalConfig& cfg) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::domain_error(
        "coefficients: rho must be positive (h^{phi phi} is singular at the "
        "axis; the axis is handled by mode regularity, not by coefficient "
        "evaluation)");
  CoefficientSample s;
  s.rho = rho;
  s.chi = chi(rho, cfg);
  s.sigma = rho;
  s.h_rho_rho = rho;
  s.h_zz = rho;
  s.h_phi_phi = 1.0 / rho - cfg.omega * cfg.omega * rho;
  return s;
}

// -------------------------------------------------------------------------
// Metric-free boundary co-normal for the sphere r = R.
//
// n_b = 1/(n-1)! (i_* xi)^{a1..a_{n-1}} eps_{b a1..a_{n-1}}
//
// evaluated with the standard angular parametrization of the sphere in
// Cartesian coordinates, then transformed to spherical components as a
// covector density of weight -1 (divide by the chart Jacobian).  The result
// must be the covector dr: components (1, 0[, 0]).
//
// Input point: (r, phi) for n = 2, (r, theta, phi) for n = 3, and the point
// must lie on the sphere within `tol`.  Poles are handled by a limiting
// parametrization (the theta-phi tangent frame degenerates there, but the
// transformed components have a finite limit).
// -------------------------------------------------------------------------
inline std::vector<double> conormal_spherical(const std::vector<double>& point,
                                              const HelicalConfig& cfg,
                                              double tol = 1e-8) {
  const double R = cfg.R;
  if (static_cast<int>(point.size()) != cfg.n)
    throw std::invalid_argument("conormal_spherical: point size != n");
  const double r = point[0];
  if (std::abs(r - R) > tol * std::max(1.0, R))
    throw std::domain_error("conormal_spherical: point is off the sphere");

  if (cfg.n == 2) {
    const double phi = point[1];
    // tangent of the circle parametrized by phi, in Cartesian components
    const double tx = -R * std::sin(phi), ty = R * std::cos(phi);
    // n_b = eps_{ba} T^a  ->  (T_y, -T_x)
    const double nx = ty, ny = -tx;
    // covector density of weight -1: divide by det d(x,y)/d(r,phi) = r
    const double jac = R;
    const double n_r = (std::cos(phi) * nx + std::sin(phi) * ny) / jac;
    const double n_phi = (-R * std::sin(phi) * nx + R * std::cos(phi) * ny) / jac;
    return {n_r, n_phi};
  }

  double theta = point[1];
  const double phi = point[2];
  // limiting parametrization at the poles: the components are constant in
  // theta away from the poles, so a small offset evaluates the limit
  const double pole_eps = 1e-4;
  if (std::sin(theta) < std::sin(pole_eps))
    theta = (std::cos(theta) > 0.0) ? pole_eps : M_PI - pole_eps;

  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  // tangents of the (theta, phi) parametrization in Cartesian components
  const std::array<double, 3> t_th{R * ct * cp, R * ct * sp, -R * st};
  const std::array<double, 3> t_ph{-R * st * sp, R * st * cp, 0.0};
  // n_b = eps_{bac} T^a_theta T^c_phi  (cross product)
  const std::array<double, 3> ncart{t_th[1] * t_ph[2] - t_th[2] * t_ph[1],
                                    t_th[2] * t_ph[0] - t_th[0] * t_ph[2],
                                    t_th[0] * t_ph[1] - t_th[1] * t_ph[0]};
  // chart rows d(x,y,z)/d(r,theta,phi); weight -1 division by r^2 sin(theta)
  const std::array<double, 3> e_r{st * cp, st * sp, ct};
  const double jac = R * R * st;
  auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  };
  return {dot(e_r, ncart) / jac, dot(t_th, ncart) / jac, dot(t_ph, ncart) / jac};
}

}  // namespace helical

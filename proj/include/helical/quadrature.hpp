#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "helical/derivs.hpp"
#include "helical/grid.hpp"
#include "helical/reduction.hpp"

namespace helical {

// Composite second-order rules for weight-one densities.  Integrands are
// plain coordinate densities (all sigma / Jacobian factors already inside),
// so the rules are trapezoid in r and theta (half cells at the ends) and the
// rectangle rule over the periodic phi grid.

namespace detail {

inline Eigen::VectorXd trapezoid_weights(int count, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(count, h);
  w[0] = 0.5 * h;
  w[count - 1] = 0.5 * h;
  return w;
}

}  // namespace detail

// Integral over the ball chart of a density sampled on the full grid:
// n = 2: integral dr dphi; n = 3: integral dr dtheta dphi.
template <typename Vec>
inline auto volume_quadrature(const Vec& density, const Grid& g) ->
    typename Vec::Scalar {
  if (density.size() != g.field_size())
    throw std::invalid_argument("volume_quadrature: sample shape mismatch");
  const Eigen::VectorXd wr = detail::trapezoid_weights(g.J + 1, g.hr);
  typename Vec::Scalar total{};
  if (g.n == 2) {
    for (int j = 0; j <= g.J; ++j) {
      typename Vec::Scalar ring{};
      for (int l = 0; l < g.n_phi; ++l) ring += density[g.fidx(j, l)];
      total += wr[j] * g.hphi * ring;
    }
    return total;
  }
  const Eigen::VectorXd wt = detail::trapezoid_weights(g.K + 1, g.htheta);
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k) {
      typename Vec::Scalar ring{};
      for (int l = 0; l < g.n_phi; ++l) ring += density[g.fidx(g.sidx(j, k), l)];
      total += wr[j] * wt[k] * g.hphi * ring;
    }
  return total;
}

// Integral over the boundary parametrization of a boundary density:
// n = 2: integral dphi over the circle; n = 3: integral dtheta dphi.
template <typename Vec>
inline auto boundary_quadrature(const Vec& density, const Grid& g) ->
    typename Vec::Scalar {
  if (density.size() != g.boundary_field_size())
    throw std::invalid_argument("boundary_quadrature: sample shape mismatch");
  typename Vec::Scalar total{};
  if (g.n == 2) {
    for (int l = 0; l < g.n_phi; ++l) total += density[l];
    return total * g.hphi;
  }
  const Eigen::VectorXd wt = detail::trapezoid_weights(g.K + 1, g.htheta);
  for (int k = 0; k <= g.K; ++k) {
    typename Vec::Scalar ring{};
    for (int l = 0; l < g.n_phi; ++l) ring += density[g.bidx(k, l)];
    total += wt[k] * g.hphi * ring;
  }
  return total;
}

// ---- axisymmetric (per-mode) helpers over the spatial grid only ----

// integral of an axisymmetric chart density, including the 2*pi from phi
template <typename Vec>
inline auto volume_quadrature_axisym(const Vec& density, const Grid& g) ->
    typename Vec::Scalar {
  if (density.size() != g.spatial_size())
    throw std::invalid_argument("volume_quadrature_axisym: shape mismatch");
  const Eigen::VectorXd wr = detail::trapezoid_weights(g.J + 1, g.hr);
  typename Vec::Scalar total{};
  if (g.n == 2) {
    for (int j = 0; j <= g.J; ++j) total += wr[j] * density[j];
  } else {
    const Eigen::VectorXd wt = detail::trapezoid_weights(g.K + 1, g.htheta);
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k <= g.K; ++k) total += wr[j] * wt[k] * density[g.sidx(j, k)];
  }
  return total * (2.0 * M_PI);
}

// sigma-weight vector over spatial nodes: quadrature weight times the chart
// volume density (rho for n = 2, r^2 sin(theta) for n = 3).  Sums to the
// sigma-measure of the ball (up to the 2*pi factor, which cancels in means).
inline Eigen::VectorXd sigma_weights(const Grid& g) {
  Eigen::VectorXd s(g.spatial_size());
  const Eigen::VectorXd wr = detail::trapezoid_weights(g.J + 1, g.hr);
  if (g.n == 2) {
    for (int j = 0; j <= g.J; ++j) s[j] = wr[j] * g.r[j];
  } else {
    const Eigen::VectorXd wt = detail::trapezoid_weights(g.K + 1, g.htheta);
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k <= g.K; ++k)
        s[g.sidx(j, k)] = wr[j] * wt[k] * g.r[j] * g.r[j] * std::sin(g.theta[k]);
  }
  return s;
}

// sigma-weighted mean of a full real field
inline double sigma_mean(const Eigen::Ref<const Eigen::VectorXd>& field,
                         const Grid& g) {
  const Eigen::VectorXd s = sigma_weights(g);
  double num = 0.0, den = 0.0;
  for (int sp = 0; sp < g.spatial_size(); ++sp) {
    double ring = 0.0;
    for (int l = 0; l < g.n_phi; ++l) ring += field[g.fidx(sp, l)];
    num += s[sp] * ring / g.n_phi;
    den += s[sp];
  }
  return num / den;
}

// ---- discrete Stokes check -------------------------------------------------
//
// V holds the chart components of a weight-one vector density sampled on the
// full grid: (V^r, V^phi) for n = 2, (V^r, V^theta, V^phi) for n = 3.
// Returns | int_B d_a V^a  -  int_dB n_a V^a | with n_a from the metric-free
// co-normal (which is dr on the sphere).
inline double stokes_residual(const std::vector<Eigen::VectorXd>& V, const Grid& g,
                              const HelicalConfig& cfg) {
  if (static_cast<int>(V.size()) != cfg.n)
    throw std::invalid_argument("stokes_residual: expected n components");
  for (const auto& c : V)
    if (c.size() != g.field_size())
      throw std::invalid_argument("stokes_residual: sample shape mismatch");

  Eigen::VectorXd div = d_dr_field(V[0], g);
  if (g.n == 2) {
    div += d_dphi_field(V[1], g);
  } else {
    div += d_dtheta_field(V[1], g);
    div += d_dphi_field(V[2], g);
  }
  const double vol = volume_quadrature(div, g);

  Eigen::VectorXd bdry(g.boundary_field_size());
  for (int k = 0; k < g.boundary_size(); ++k) {
    std::vector<double> pt = (g.n == 2)
                                 ? std::vector<double>{g.R, 0.0}
                                 : std::vector<double>{g.R, g.theta[k], 0.0};
    const std::vector<double> nvec = conormal_spherical(pt, cfg);
    for (int l = 0; l < g.n_phi; ++l) {
      double contraction = 0.0;
      for (int a = 0; a < g.n; ++a)
        contraction += nvec[a] * V[a][g.fidx(g.sidx(g.J, k), l)];
      bdry[g.bidx(k, l)] = contraction;
    }
  }
  const double surf = boundary_quadrature(bdry, g);
  return std::abs(vol - surf);
}

}  // namespace helical

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "helical/config.hpp"

namespace helical {

struct GridResolution {
  int nr = 64;      // radial cells J; nodes r_j = j R/J, j = 0..J
  int ntheta = 0;   // theta cells K (n = 3 only); nodes on [0, pi]
  int nphi = 16;    // angular synthesis resolution
};

// Discrete chart of the ball.
//   n = 2: radial nodes on [0, R], fields live on (r_j, phi_l).
//   n = 3: tensor nodes (r_j, theta_k) on [0, R] x [0, pi] with
//          (rho, z) = (r sin theta, r cos theta); fields on (r, theta, phi).
// Boundary nodes sit exactly at r = R.
struct Grid {
  int n = 2;
  double R = 1.0;
  int J = 0, K = 0, n_phi = 0;
  double hr = 0.0, htheta = 0.0, hphi = 0.0;
  Eigen::VectorXd r, theta, phi;
  bool light_cylinder_interior = false;
  int nodes_inside_lc = 0, nodes_outside_lc = 0;

  // per-mode spatial layout: n = 2 index j; n = 3 index j*(K+1) + k
  int spatial_size() const { return n == 2 ? J + 1 : (J + 1) * (K + 1); }
  int sidx(int j, int k = 0) const { return n == 2 ? j : j * (K + 1) + k; }

  // per-mode boundary nodes at r = R
  int boundary_size() const { return n == 2 ? 1 : K + 1; }

  // full real-field layout: spatial index x phi index
  int field_size() const { return spatial_size() * n_phi; }
  int fidx(int s, int l) const { return s * n_phi + l; }

  // full boundary layout: n = 2 size n_phi; n = 3 size (K+1)*n_phi
  int boundary_field_size() const { return boundary_size() * n_phi; }
  int bidx(int k, int l) const { return k * n_phi + l; }

  double rho(int j, int k = 0) const {
    return n == 2 ? r[j] : r[j] * std::sin(theta[k]);
  }
  double z(int j, int k) const { return r[j] * std::cos(theta[k]); }

  // representative mesh width for O(h^2) thresholds
  double h() const { return n == 2 ? hr : std::max(hr, R * htheta / M_PI); }
};

inline Grid build_grid(const HelicalConfig& cfg, const GridResolution& res) {
  cfg.validate();
  if (res.nr < 15)
    throw std::invalid_argument("build_grid: need at least 16 radial nodes");
  if (cfg.n == 3 && res.ntheta < 15)
    throw std::invalid_argument("build_grid: need at least 16 theta nodes");
  if (res.nphi < 4)
    throw std::invalid_argument("build_grid: nphi too small");

  Grid g;
  g.n = cfg.n;
  g.R = cfg.R;
  g.J = res.nr;
  g.K = cfg.n == 3 ? res.ntheta : 0;
  g.n_phi = res.nphi;
  g.hr = cfg.R / g.J;
  g.r = Eigen::VectorXd::LinSpaced(g.J + 1, 0.0, cfg.R);
  g.r[g.J] = cfg.R;  // boundary exact
  if (cfg.n == 3) {
    g.htheta = M_PI / g.K;
    g.theta = Eigen::VectorXd::LinSpaced(g.K + 1, 0.0, M_PI);
  }
  g.hphi = 2.0 * M_PI / g.n_phi;
  g.phi = Eigen::VectorXd::LinSpaced(g.n_phi, 0.0, 2.0 * M_PI * (g.n_phi - 1) / g.n_phi);

  g.light_cylinder_interior = cfg.light_cylinder_interior();
  if (g.light_cylinder_interior) {
    const double rlc = cfg.light_cylinder_radius();
    for (int j = 0; j <= g.J; ++j) {
      if (g.r[j] < rlc - 1e-14) ++g.nodes_inside_lc;
      if (g.r[j] > rlc + 1e-14) ++g.nodes_outside_lc;
    }
    // the radial grid must resolve the crossing (along the equator for n=3)
    if (g.nodes_inside_lc < 8 || g.nodes_outside_lc < 8)
      throw std::invalid_argument(
          "build_grid: resolution too coarse to resolve the light cylinder "
          "(need >= 8 radial nodes on each side of r = 1/omega), got " +
          std::to_string(g.nodes_inside_lc) + " inside / " +
          std::to_string(g.nodes_outside_lc) + " outside");
  }
  return g;
}

}  // namespace helical

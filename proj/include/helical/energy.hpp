#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "helical/derivs.hpp"
#include "helical/grid.hpp"
#include "helical/quadrature.hpp"

namespace helical {

// Multiplier pair (a, b) of the generalized energy integral
//   E[u] = int_B (a u + b^g u_g) d_a(h^{ab} u_b),
// sampled on the full grid; b components are in the cylindrical coordinate
// basis (b^rho, b^phi[, b^z]).
struct Multiplier {
  Eigen::VectorXd a;
  Eigen::VectorXd b_rho, b_phi, b_z;  // b_z unused for n = 2
};

// The proof's choice: a = -1, b = 2/(1-n) (rho d_rho + z d_z + sign R omega d_phi).
// Its contraction b^a u_a vanishes on the boundary for homogeneous Sommerfeld
// fields.
inline Multiplier proof_multiplier(const Grid& g, const HelicalConfig& cfg) {
  Multiplier m;
  const int fs = g.field_size();
  const double c = 2.0 / (1.0 - cfg.n);
  m.a = Eigen::VectorXd::Constant(fs, -1.0);
  m.b_rho.resize(fs);
  m.b_phi = Eigen::VectorXd::Constant(fs, c * cfg.sign * cfg.R * cfg.omega);
  if (cfg.n == 3) m.b_z.resize(fs);
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k)
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        m.b_rho[idx] = c * g.rho(j, k);
        if (cfg.n == 3) m.b_z[idx] = c * g.z(j, k);
      }
  return m;
}

namespace detail {

// cylindrical first derivatives of a full field by the solver's stencils;
// values at coordinate-singular nodes are unreliable and must only be used
// through the singular-node fill
struct FieldBundle {
  Eigen::VectorXd u, u_rho, u_phi, u_z, u_r, u_th;
};

inline FieldBundle make_bundle(const Eigen::Ref<const Eigen::VectorXd>& u,
                               const Grid& g) {
  FieldBundle b;
  b.u = u;
  b.u_phi = d_dphi_field(u, g);
  if (g.n == 2) {
    b.u_rho = d_dr_field(u, g);
    b.u_r = b.u_rho;
    return b;
  }
  b.u_r = d_dr_field(u, g);
  b.u_th = d_dtheta_field(u, g);
  b.u_rho.resize(u.size());
  b.u_z.resize(u.size());
  for (int j = 0; j <= g.J; ++j) {
    const double r = std::max(g.r[j], 1e-300);
    for (int k = 0; k <= g.K; ++k) {
      const double st = std::sin(g.theta[k]), ct = std::cos(g.theta[k]);
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        b.u_rho[idx] = st * b.u_r[idx] + ct / r * b.u_th[idx];
        b.u_z[idx] = ct * b.u_r[idx] - st / r * b.u_th[idx];
      }
    }
  }
  return b;
}

// chart-density form of d_a(h^{ab} u_b):  the cylindrical density for n = 2,
// r times it for n = 3 (so plain chart quadrature applies directly)
inline Eigen::VectorXd density_operator_chart(const FieldBundle& b, const Grid& g,
                                              const HelicalConfig& cfg) {
  const double w2 = cfg.omega * cfg.omega;
  Eigen::VectorXd Gr(b.u.size()), Gphi(b.u.size());
  if (g.n == 2) {
    for (int j = 0; j <= g.J; ++j) {
      const double rho = g.r[j];
      const double hphi = (1.0 - w2 * rho * rho) / std::max(rho, 1e-300);
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(j, l);
        Gr[idx] = rho * b.u_rho[idx];
        Gphi[idx] = hphi * b.u_phi[idx];
      }
    }
    return d_dr_field(Gr, g) + d_dphi_field(Gphi, g);
  }
  Eigen::VectorXd Gth(b.u.size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k) {
      const double st = std::sin(g.theta[k]);
      const double rho = g.r[j] * st;
      const double alpha = g.r[j] * g.r[j] * st;
      const double gph = (1.0 - w2 * rho * rho) / std::max(st, 1e-300);
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        Gr[idx] = alpha * b.u_r[idx];
        Gth[idx] = st * b.u_th[idx];
        Gphi[idx] = gph * b.u_phi[idx];
      }
    }
  return d_dr_field(Gr, g) + d_dtheta_field(Gth, g) + d_dphi_field(Gphi, g);
}

// h^{ab} u_a v_b for two bundles (the energy density P when u = v)
inline double h_contraction(const FieldBundle& ub, const FieldBundle& vb, int idx,
                            double rho, double w2, int n) {
  const double hphi = (1.0 - w2 * rho * rho) / std::max(rho, 1e-300);
  double out = rho * ub.u_rho[idx] * vb.u_rho[idx] + hphi * ub.u_phi[idx] * vb.u_phi[idx];
  if (n == 3) out += rho * ub.u_z[idx] * vb.u_z[idx];
  return out;
}

}  // namespace detail

// E[u] by direct quadrature of (a u + b^g u_g) d_a(h^{ab} u_b).
inline double energy_direct(const Eigen::Ref<const Eigen::VectorXd>& u,
                            const Multiplier& mult, const Grid& g,
                            const HelicalConfig& cfg) {
  const detail::FieldBundle b = detail::make_bundle(u, g);
  const Eigen::VectorXd D = detail::density_operator_chart(b, g, cfg);
  Eigen::VectorXd I(g.field_size());
  for (int s = 0; s < g.spatial_size(); ++s)
    for (int l = 0; l < g.n_phi; ++l) {
      const int idx = g.fidx(s, l);
      double mul = mult.a[idx] * b.u[idx] + mult.b_rho[idx] * b.u_rho[idx] +
                   mult.b_phi[idx] * b.u_phi[idx];
      if (cfg.n == 3) mul += mult.b_z[idx] * b.u_z[idx];
      I[idx] = mul * D[idx];
    }
  fill_singular_volume_nodes(I, g);
  return volume_quadrature(I, g);
}

// The two sides of the integration-by-parts identity: the expanded volume
// term and the boundary term whose sum equals E[u] up to O(h^2).
inline std::pair<double, double> energy_expanded(
    const Eigen::Ref<const Eigen::VectorXd>& u, const Multiplier& mult,
    const Grid& g, const HelicalConfig& cfg) {
  using detail::FieldBundle;
  const double w2 = cfg.omega * cfg.omega;
  const FieldBundle ub = detail::make_bundle(u, g);
  const FieldBundle ab = detail::make_bundle(mult.a, g);
  const FieldBundle brb = detail::make_bundle(mult.b_rho, g);
  const FieldBundle bpb = detail::make_bundle(mult.b_phi, g);
  FieldBundle bzb;
  if (cfg.n == 3) bzb = detail::make_bundle(mult.b_z, g);
  const Eigen::VectorXd Da = detail::density_operator_chart(ab, g, cfg);

  // ---- volume term ----
  Eigen::VectorXd I(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
      const double rho = g.rho(j, k);
      const double irho = 1.0 / std::max(rho, 1e-300);
      const double hphi = (1.0 - w2 * rho * rho) * irho;
      const double chart = (g.n == 2) ? 1.0 : g.r[j];
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        const double P = detail::h_contraction(ub, ub, idx, rho, w2, g.n);
        // div b and the b-gradient contraction b^g_{,a} h^{ab} u_g u_b
        double divb = brb.u_rho[idx] + bpb.u_phi[idx];
        double C = (rho * brb.u_rho[idx] * ub.u_rho[idx] +
                    hphi * brb.u_phi[idx] * ub.u_phi[idx]) *
                       ub.u_rho[idx] +
                   (rho * bpb.u_rho[idx] * ub.u_rho[idx] +
                    hphi * bpb.u_phi[idx] * ub.u_phi[idx]) *
                       ub.u_phi[idx];
        if (cfg.n == 3) {
          divb += bzb.u_z[idx];
          C += rho * brb.u_z[idx] * ub.u_z[idx] * ub.u_rho[idx] +
               rho * bpb.u_z[idx] * ub.u_z[idx] * ub.u_phi[idx] +
               (rho * bzb.u_rho[idx] * ub.u_rho[idx] +
                hphi * bzb.u_phi[idx] * ub.u_phi[idx] +
                rho * bzb.u_z[idx] * ub.u_z[idx]) *
                   ub.u_z[idx];
        }
        // b^g d_g h^{ab} u_a u_b: h depends on rho only
        double grad2 = ub.u_rho[idx] * ub.u_rho[idx];
        if (cfg.n == 3) grad2 += ub.u_z[idx] * ub.u_z[idx];
        const double dh = mult.b_rho[idx] *
                          (grad2 - (irho * irho + w2) * ub.u_phi[idx] * ub.u_phi[idx]);
        const double cylV = -mult.a[idx] * P + 0.5 * (dh + divb * P) - C;
        I[idx] = 0.5 * Da[idx] * ub.u[idx] * ub.u[idx] + chart * cylV;
      }
    }
  fill_singular_volume_nodes(I, g);
  const double volume_term = volume_quadrature(I, g);

  // ---- boundary term:  n_a { (au + b^g u_g) h^{ab} u_b - 1/2 h^{ab} a_b u^2
  //                            - 1/2 b^a h^{bg} u_b u_g } ----
  // evaluated as the Jacobian-included radial component of the current W:
  // n = 2:  W^rho at r = R;   n = 3:  rho W^rho + z W^z at r = R.
  Eigen::VectorXd Ib(g.boundary_field_size());
  for (int k = 0; k < g.boundary_size(); ++k) {
    const double rho = g.rho(g.J, k);
    const double z = (g.n == 3) ? g.z(g.J, k) : 0.0;
    for (int l = 0; l < g.n_phi; ++l) {
      const int idx = g.fidx(g.sidx(g.J, k), l);
      const double P = detail::h_contraction(ub, ub, idx, rho, w2, g.n);
      double Q = mult.b_rho[idx] * ub.u_rho[idx] + mult.b_phi[idx] * ub.u_phi[idx];
      if (cfg.n == 3) Q += mult.b_z[idx] * ub.u_z[idx];
      const double au = mult.a[idx] * ub.u[idx];
      const double u2 = ub.u[idx] * ub.u[idx];
      const double Wr = (au + Q) * rho * ub.u_rho[idx] -
                        0.5 * rho * ab.u_rho[idx] * u2 - 0.5 * mult.b_rho[idx] * P;
      if (g.n == 2) {
        Ib[g.bidx(k, l)] = Wr;
      } else {
        const double Wz = (au + Q) * rho * ub.u_z[idx] -
                          0.5 * rho * ab.u_z[idx] * u2 - 0.5 * mult.b_z[idx] * P;
        Ib[g.bidx(k, l)] = rho * Wr + z * Wz;
      }
    }
  }
  fill_singular_boundary_nodes(Ib, g);
  const double boundary_term = boundary_quadrature(Ib, g);
  return {volume_term, boundary_term};
}

inline double ibp_residual(const Eigen::Ref<const Eigen::VectorXd>& u,
                           const Multiplier& mult, const Grid& g,
                           const HelicalConfig& cfg) {
  const double direct = energy_direct(u, mult, g, cfg);
  const auto [vol, bdry] = energy_expanded(u, mult, g, cfg);
  return std::abs(direct - (vol + bdry));
}

// ---- the proof's non-negative integrands ---------------------------------

// (1/(n-1)) sigma [ (u_rho^2 + sum_i u_i^2) + (1/rho^2 + omega^2) u_phi^2 ]
inline double proof_volume_integrand(double rho, double u_rho, double u_phi,
                                     std::span<const double> u_i, int n,
                                     double omega) {
  if (!(rho > 0.0)) throw std::domain_error("proof_volume_integrand: rho <= 0");
  double grad2 = u_rho * u_rho;
  for (double ui : u_i) grad2 += ui * ui;
  const double w = 1.0 / (n - 1.0);
  return w * rho * (grad2 + (1.0 / (rho * rho) + omega * omega) * u_phi * u_phi);
}

inline double proof_volume_integrand(double rho, double u_rho, double u_phi,
                                     const HelicalConfig& cfg, double u_z = 0.0) {
  if (cfg.n == 2) return proof_volume_integrand(rho, u_rho, u_phi, {}, 2, cfg.omega);
  const double uz[1] = {u_z};
  return proof_volume_integrand(rho, u_rho, u_phi, std::span<const double>(uz, 1),
                                3, cfg.omega);
}

// Boundary integrand of the non-negativity identity and its completed-square
// lower bound after rotating z^i to (|z|, 0, ..., 0):
//   integrand  = pre [ (z.u)^2 + rho^2 |u|^2 + (1 + w^2|z|^2) u_phi^2
//                      + 2 s R w (z.u) u_phi ]
//   lower      = pre [ u_phi^2 + (R u_1 + s w |z| u_phi)^2 ],
//   pre = sigma R / ((n-1) rho^2),  u_1 = (z.u)/|z|  (|u| when z = 0).
// The gap equals pre rho^2 (|u|^2 - u_1^2) >= 0; it vanishes identically for
// n <= 3 where there is at most one z direction.
struct BoundaryIntegrand {
  double integrand;
  double lower_bound;
};

inline BoundaryIntegrand proof_boundary_integrand(
    double rho, std::span<const double> z_i, std::span<const double> u_i,
    double u_phi, int n, double R, double omega, int sign, double tol = 1e-8) {
  if (n != static_cast<int>(z_i.size()) + 2 || z_i.size() != u_i.size())
    throw std::invalid_argument("proof_boundary_integrand: bad sample arity");
  if (!(rho > 0.0)) throw std::domain_error("proof_boundary_integrand: rho <= 0");
  double zz = 0.0, zu = 0.0, uu = 0.0;
  for (size_t i = 0; i < z_i.size(); ++i) {
    zz += z_i[i] * z_i[i];
    zu += z_i[i] * u_i[i];
    uu += u_i[i] * u_i[i];
  }
  if (std::abs(rho * rho + zz - R * R) > tol * R * R)
    throw std::domain_error("proof_boundary_integrand: point is off the sphere");
  const double pre = R / ((n - 1.0) * rho);  // sigma R / rho^2 with sigma = rho
  const double integ =
      pre * (zu * zu + rho * rho * uu + (1.0 + omega * omega * zz) * u_phi * u_phi +
             2.0 * sign * R * omega * zu * u_phi);
  const double zn = std::sqrt(zz);
  const double u1 = (zn > 0.0) ? zu / zn : std::sqrt(uu);
  const double sq = R * u1 + sign * omega * zn * u_phi;
  const double lower = pre * (u_phi * u_phi + sq * sq);
  return {integ, lower};
}

inline BoundaryIntegrand proof_boundary_integrand(double rho, double z, double u_z,
                                                  double u_phi,
                                                  const HelicalConfig& cfg) {
  if (cfg.n == 2)
    return proof_boundary_integrand(rho, {}, {}, u_phi, 2, cfg.R, cfg.omega,
                                    cfg.sign);
  const double zv[1] = {z}, uv[1] = {u_z};
  return proof_boundary_integrand(rho, std::span<const double>(zv, 1),
                                  std::span<const double>(uv, 1), u_phi, 3, cfg.R,
                                  cfg.omega, cfg.sign);
}

// ---- field-level evaluations of the identity's integrands ----------------

struct NonegTotals {
  double volume = 0.0;
  double boundary = 0.0;
  double min_volume_integrand = 0.0;  // over regular nodes
  double min_boundary_gap = 0.0;      // min of integrand - lower_bound
  double min_lower_bound = 0.0;
};

// Totals of the two non-negative integrands for a sampled field, with the
// parametrized boundary measure (the extra R Jacobian factor for n = 3 that
// the chart boundary integral carries).  When `volume_integrand_out` is
// given it receives the chart-density integrand samples (plottable with
// write_field_table).
inline NonegTotals noneg_totals(const Eigen::Ref<const Eigen::VectorXd>& u,
                                const Grid& g, const HelicalConfig& cfg,
                                Eigen::VectorXd* volume_integrand_out = nullptr) {
  const detail::FieldBundle b = detail::make_bundle(u, g);
  NonegTotals out;
  Eigen::VectorXd I(g.field_size());
  bool first = true;
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
      const bool singular =
          (g.n == 2) ? (j == 0)
                     : (j == 0 || k == 0 || k == g.K);
      const double chart = (g.n == 2) ? 1.0 : g.r[j];
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        if (singular) {
          I[idx] = 0.0;  // filled below
          continue;
        }
        const double val =
            proof_volume_integrand(g.rho(j, k), b.u_rho[idx], b.u_phi[idx], cfg,
                                   g.n == 3 ? b.u_z[idx] : 0.0);
        I[idx] = chart * val;
        if (first || val < out.min_volume_integrand) out.min_volume_integrand = val;
        first = false;
      }
    }
  fill_singular_volume_nodes(I, g);
  out.volume = volume_quadrature(I, g);
  if (volume_integrand_out) *volume_integrand_out = I;

  Eigen::VectorXd Ib = Eigen::VectorXd::Zero(g.boundary_field_size());
  const double measure = (g.n == 3) ? g.R : 1.0;
  bool bfirst = true;
  for (int k = 0; k < g.boundary_size(); ++k) {
    const bool singular = (g.n == 3) && (k == 0 || k == g.K);
    if (singular) continue;
    const double rho = g.rho(g.J, k);
    const double z = (g.n == 3) ? g.z(g.J, k) : 0.0;
    for (int l = 0; l < g.n_phi; ++l) {
      const int idx = g.fidx(g.sidx(g.J, k), l);
      const BoundaryIntegrand bi = proof_boundary_integrand(
          rho, z, g.n == 3 ? b.u_z[idx] : 0.0, b.u_phi[idx], cfg);
      Ib[g.bidx(k, l)] = measure * bi.integrand;
      const double gap = bi.integrand - bi.lower_bound;
      if (bfirst || gap < out.min_boundary_gap) out.min_boundary_gap = gap;
      if (bfirst || bi.lower_bound < out.min_lower_bound)
        out.min_lower_bound = bi.lower_bound;
      bfirst = false;
    }
  }
  fill_singular_boundary_nodes(Ib, g);
  out.boundary = boundary_quadrature(Ib, g);
  return out;
}

// b^a u_a of the proof multiplier sampled on the boundary:
// 2/(1-n) (rho u_rho + z u_z + s R omega u_phi) = 2R/(1-n) (u_r + s omega u_phi),
// which vanishes for fields with zero Sommerfeld residual.
inline Eigen::VectorXd proof_multiplier_boundary_contraction(
    const Eigen::Ref<const Eigen::VectorXd>& u, const Grid& g,
    const HelicalConfig& cfg) {
  const Eigen::VectorXd ur = d_dr_field(u, g);
  const Eigen::VectorXd uphi = d_dphi_field(u, g);
  const double c = 2.0 / (1.0 - cfg.n);
  Eigen::VectorXd out(g.boundary_field_size());
  for (int k = 0; k < g.boundary_size(); ++k)
    for (int l = 0; l < g.n_phi; ++l) {
      const int idx = g.fidx(g.sidx(g.J, k), l);
      out[g.bidx(k, l)] = c * cfg.R * (ur[idx] + cfg.sign * cfg.omega * uphi[idx]);
    }
  return out;
}

// ---- bundled report -------------------------------------------------------

struct EnergyReport {
  double E_direct = 0.0;
  double volume_term = 0.0;
  double boundary_term = 0.0;
  double ibp_residual = 0.0;
  double min_volume_integrand = 0.0;
  double min_boundary_gap = 0.0;
};

inline EnergyReport energy_report(const Eigen::Ref<const Eigen::VectorXd>& u,
                                  const Multiplier& mult, const Grid& g,
                                  const HelicalConfig& cfg) {
  EnergyReport rep;
  rep.E_direct = energy_direct(u, mult, g, cfg);
  const auto [vol, bdry] = energy_expanded(u, mult, g, cfg);
  rep.volume_term = vol;
  rep.boundary_term = bdry;
  rep.ibp_residual = std::abs(rep.E_direct - vol - bdry);
  const NonegTotals nt = noneg_totals(u, g, cfg);
  rep.min_volume_integrand = nt.min_volume_integrand;
  rep.min_boundary_gap = nt.min_boundary_gap;
  return rep;
}

// ---- uniqueness certificate ------------------------------------------------

struct UniquenessCertificate {
  double grad_max = 0.0;           // sup of cylindrical gradient of u1 - u2
  double mean_adjusted_sup = 0.0;  // sup |d - sigma-mean(d)|
  double noneg_volume = 0.0;
  double noneg_boundary = 0.0;
  double scale = 0.0;  // gradient scale of the inputs, for relative checks
  double h = 0.0;
};

inline UniquenessCertificate uniqueness_certificate(
    const Eigen::Ref<const Eigen::VectorXd>& u1,
    const Eigen::Ref<const Eigen::VectorXd>& u2, const Grid& g,
    const HelicalConfig& cfg) {
  if (u1.size() != g.field_size() || u2.size() != g.field_size())
    throw std::invalid_argument("uniqueness_certificate: field shape mismatch");
  const Eigen::VectorXd d = u1 - u2;
  UniquenessCertificate cert;
  cert.h = g.h();
  const detail::FieldBundle db = detail::make_bundle(d, g);
  const detail::FieldBundle rb = detail::make_bundle(u1, g);
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
      const bool singular =
          (g.n == 2) ? (j == 0) : (j == 0 || k == 0 || k == g.K);
      if (singular) continue;
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        double gd = std::hypot(db.u_rho[idx], db.u_phi[idx]);
        double gs = std::hypot(rb.u_rho[idx], rb.u_phi[idx]);
        if (g.n == 3) {
          gd = std::hypot(gd, db.u_z[idx]);
          gs = std::hypot(gs, rb.u_z[idx]);
        }
        cert.grad_max = std::max(cert.grad_max, gd);
        cert.scale = std::max(cert.scale, gs);
      }
    }
  const double mean = sigma_mean(d, g);
  cert.mean_adjusted_sup = (d.array() - mean).abs().maxCoeff();
  cert.scale = std::max(cert.scale, (u1.array() - sigma_mean(u1, g)).abs().maxCoeff());
  const NonegTotals nt = noneg_totals(d, g, cfg);
  cert.noneg_volume = nt.volume;
  cert.noneg_boundary = nt.boundary;
  return cert;
}

inline UniquenessCertificate uniqueness_certificate(
    const Eigen::Ref<const Eigen::VectorXd>& u1,
    const Eigen::Ref<const Eigen::VectorXd>& u2, const HelicalConfig& cfg,
    const GridResolution& res) {
  const Grid g = build_grid(cfg, res);
  return uniqueness_certificate(u1, u2, g, cfg);
}

template <typename Problem>
inline UniquenessCertificate uniqueness_certificate(
    const Eigen::Ref<const Eigen::VectorXd>& u1,
    const Eigen::Ref<const Eigen::VectorXd>& u2, const Problem& problem) {
  return uniqueness_certificate(u1, u2, problem.config, problem.resolution);
}

}  // namespace helical

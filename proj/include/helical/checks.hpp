#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helical/energy.hpp"
#include "helical/nullspace.hpp"
#include "helical/presets.hpp"
#include "helical/quadrature.hpp"
#include "helical/reduction.hpp"
#include "helical/solve.hpp"

namespace helical {

// One verification check with its measured numbers.  The thresholds are
// pinned here, in code; the CLI and the acceptance binary both run these.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {
inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace detail

// ---- criterion 1: manufactured-solution convergence -------------------------
// omega R = 2, modes |m| <= 4, order >= 1.8 on the pinned grid ladders.
inline std::vector<CheckResult> check_convergence(int n) {
  const HelicalConfig cfg = make_config(n, 2.0, 1.0);
  ManufacturedSolution ms(cfg, 4);
  std::vector<GridResolution> ladder;
  if (n == 2)
    ladder = {{64, 0, 16}, {128, 0, 16}, {256, 0, 16}};
  else
    ladder = {{48, 32, 16}, {96, 64, 16}};
  std::vector<double> errs;
  for (const auto& res : ladder) {
    const Grid g = build_grid(cfg, res);
    const FullSolution sol = solve_full(ms.problem(res, 4));
    errs.push_back(field_l2_error(sol.u, ms.exact_field(g), g));
  }
  std::vector<CheckResult> out;
  for (size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    CheckResult c;
    c.name = "convergence_n" + std::to_string(n) + "_level" + std::to_string(i);
    c.pass = order >= 1.8;
    c.detail = "L2 " + detail::fmt(errs[i - 1]) + " -> " + detail::fmt(errs[i]) +
               ", observed order " + detail::fmt(order) + " (need >= 1.8)";
    out.push_back(c);
  }
  return out;
}

// ---- criterion 2: integration-by-parts identity ------------------------------
// RMS over `count` random (u, a, b) triples of the documented low-degree
// family; residual halving factor >= 3.5 per level, finest RMS residual
// <= 1e-4 x RMS volume term.
inline std::vector<CheckResult> check_energy_identity(int n, unsigned seed,
                                                      int count = 50,
                                                      int max_mode = 2) {
  const HelicalConfig cfg = make_config(n, 2.0, 1.0);
  // The ladder halves every contributing spacing.  The phi direction is
  // spectrally exact on this band-limited family (the mode-multiplication
  // derivative), so nphi stays fixed; the n = 3 radial/theta balance for
  // this family sits near J = 2K.
  std::vector<GridResolution> ladder;
  if (n == 2)
    ladder = {{128, 0, 16}, {256, 0, 16}, {512, 0, 16}};
  else
    ladder = {{112, 56, 12}, {224, 112, 12}, {448, 224, 12}};
  std::vector<double> rms_res, rms_vol;
  for (const auto& res : ladder) {
    const Grid g = build_grid(cfg, res);
    double sres = 0.0, svol = 0.0;
    for (int t = 0; t < count; ++t) {
      const EnergyTestTriple trip = energy_test_triple(g, seed + 977 * t, max_mode);
      const double direct = energy_direct(trip.u, trip.mult, g, cfg);
      const auto [vol, bdry] = energy_expanded(trip.u, trip.mult, g, cfg);
      sres += (direct - vol - bdry) * (direct - vol - bdry);
      svol += vol * vol;
    }
    rms_res.push_back(std::sqrt(sres / count));
    rms_vol.push_back(std::sqrt(svol / count));
  }
  std::vector<CheckResult> out;
  for (size_t i = 1; i < rms_res.size(); ++i) {
    const double factor = rms_res[i - 1] / rms_res[i];
    CheckResult c;
    c.name = "ibp_halving_n" + std::to_string(n) + "_level" + std::to_string(i);
    c.pass = factor >= 3.5;
    c.detail = "residual " + detail::fmt(rms_res[i - 1]) + " -> " +
               detail::fmt(rms_res[i]) + ", factor " + detail::fmt(factor) +
               " (need >= 3.5)";
    out.push_back(c);
  }
  CheckResult abs;
  abs.name = "ibp_absolute_n" + std::to_string(n);
  const double rel = rms_res.back() / rms_vol.back();
  abs.pass = rel <= 1e-4;
  abs.detail = "finest RMS residual " + detail::fmt(rms_res.back()) + " vs volume " +
               detail::fmt(rms_vol.back()) + ", ratio " + detail::fmt(rel) +
               " (need <= 1e-4)";
  out.push_back(abs);
  return out;
}

// ---- criterion 3: the proof's inequality chain -------------------------------
inline std::vector<CheckResult> check_inequality(unsigned seed, long samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_real_distribution<double> upos(0.0, 1.0);
  const double R = 1.0, omega = 2.0;

  long vol_neg = 0;
  double gap_min = 0.0, lower_min = 0.0, eq_max = 0.0, scale_max = 0.0;
  for (long i = 0; i < samples; ++i) {
    // volume integrand: dimensions alternate, rho in (0, R]
    const int n = (i % 2) ? 3 : 2;
    const double rho = upos(rng) * R + 1e-12;
    const double uz[1] = {unif(rng)};
    const double v = proof_volume_integrand(
        rho, unif(rng), unif(rng),
        n == 2 ? std::span<const double>{} : std::span<const double>(uz, 1), n,
        omega);
    if (v < 0.0) ++vol_neg;

    // boundary integrand on the sphere: n = 3 plus synthetic n = 4 samples
    const int nb = (i % 4 == 0) ? 4 : 3;
    const int sgn = (i % 2) ? +1 : -1;
    const double alpha = upos(rng) * (M_PI - 2e-3) + 1e-3;
    const double rb = R * std::sin(alpha);
    const double zn = R * std::cos(alpha);
    double zv[2], uv[2];
    if (nb == 3) {
      zv[0] = zn;
      uv[0] = unif(rng);
    } else {
      const double beta = upos(rng) * 2.0 * M_PI;
      zv[0] = zn * std::cos(beta);
      zv[1] = zn * std::sin(beta);
      uv[0] = unif(rng);
      uv[1] = unif(rng);
    }
    const double uphi = unif(rng);
    const BoundaryIntegrand bi = proof_boundary_integrand(
        rb, std::span<const double>(zv, nb - 2), std::span<const double>(uv, nb - 2),
        uphi, nb, R, omega, sgn);
    const double scale = std::abs(bi.integrand) + std::abs(bi.lower_bound) + 1.0;
    scale_max = std::max(scale_max, scale);
    gap_min = std::min(gap_min, (bi.integrand - bi.lower_bound) / scale);
    lower_min = std::min(lower_min, bi.lower_bound / scale);

    // equality witness at the n = 3 equator (z = 0)
    if (i % 8 == 0) {
      const double ue[1] = {unif(rng)};
      const double ze[1] = {0.0};
      const BoundaryIntegrand eq = proof_boundary_integrand(
          R, std::span<const double>(ze, 1), std::span<const double>(ue, 1),
          unif(rng), 3, R, omega, sgn);
      eq_max = std::max(eq_max, std::abs(eq.integrand - eq.lower_bound) /
                                    (std::abs(eq.integrand) + 1.0));
    }
  }
  std::vector<CheckResult> out;
  out.push_back({"inequality_volume_nonneg", vol_neg == 0,
                 std::to_string(samples) + " samples, " + std::to_string(vol_neg) +
                     " negative (need 0)"});
  out.push_back({"inequality_boundary_chain", gap_min >= -1e-12 && lower_min >= -1e-12,
                 "min gap " + detail::fmt(gap_min) + ", min lower bound " +
                     detail::fmt(lower_min) + " (need >= -1e-12 x scale)"});
  out.push_back({"inequality_equator_equality", eq_max <= 1e-13,
                 "max |integrand - lower| at equator " + detail::fmt(eq_max) +
                     " (need <= 1e-13)"});
  return out;
}

// ---- criterion 4: uniqueness via two solve paths ------------------------------
inline std::vector<CheckResult> check_uniqueness(int n, unsigned seed,
                                                 int count = 10) {
  const HelicalConfig cfg = make_config(n, 2.0, 1.0);
  const GridResolution res = (n == 2) ? GridResolution{96, 0, 16}
                                      : GridResolution{32, 24, 16};
  const Grid g = build_grid(cfg, res);
  const double h2 = g.h() * g.h();
  double worst_rel = 0.0, worst_vol = 0.0, worst_bdry = 0.0;
  for (int t = 0; t < count; ++t) {
    const HelicalProblem p = random_problem(cfg, res, 3, seed + 131 * t);
    const FullSolution s1 = solve_full(p, SolvePath::Direct);
    const FullSolution s2 = solve_full(p, SolvePath::Iterative);
    const UniquenessCertificate cert = uniqueness_certificate(s1.u, s2.u, g, cfg);
    const double uscale =
        (s1.u.array() - sigma_mean(s1.u, g)).abs().maxCoeff() + 1e-300;
    worst_rel = std::max(worst_rel, cert.mean_adjusted_sup / uscale);
    const NonegTotals ref = noneg_totals(s1.u, g, cfg);
    const double escale = ref.volume + std::abs(ref.boundary) + 1e-300;
    worst_vol = std::max(worst_vol, cert.noneg_volume / escale);
    worst_bdry = std::max(worst_bdry, cert.noneg_boundary / escale);
  }
  std::vector<CheckResult> out;
  out.push_back({"uniqueness_dual_path_n" + std::to_string(n), worst_rel <= 1e-8,
                 "worst gauge-aligned relative difference " + detail::fmt(worst_rel) +
                     " over " + std::to_string(count) + " problems (need <= 1e-8)"});
  const bool totals_ok = worst_vol <= 10.0 * h2 && worst_bdry <= 10.0 * h2;
  out.push_back({"uniqueness_noneg_totals_n" + std::to_string(n), totals_ok,
                 "difference-field integral totals " + detail::fmt(worst_vol) + " / " +
                     detail::fmt(worst_bdry) + " x scale (need <= 10 h^2 = " +
                     detail::fmt(10.0 * h2) + ")"});
  return out;
}

// ---- criterion 5: null-space structure ----------------------------------------
inline std::vector<CheckResult> check_nullspace(int n, unsigned seed) {
  const HelicalConfig cfg = make_config(n, 2.0, 1.0);
  std::vector<GridResolution> grids;
  if (n == 2)
    grids = {{64, 0, 8}, {128, 0, 8}};
  else
    grids = {{48, 32, 8}, {96, 64, 8}};
  std::vector<CheckResult> out;
  for (const auto& res : grids) {
    const Grid g = build_grid(cfg, res);
    for (int m : {0, 1, 2, 3}) {
      const DiscreteOperator op = assemble_mode_system(m, g, cfg);
      NullSpaceOptions opt;
      opt.seed = seed;
      const NullSpaceReport rep = null_space_probe(op, opt);
      const double thresh = 1e-6 * rep.sigma_max;
      int below = 0;
      for (int i = 0; i < rep.singular_values.size(); ++i)
        if (rep.singular_values[i] < thresh) ++below;
      CheckResult c;
      c.name = "nullspace_n" + std::to_string(n) + "_J" + std::to_string(res.nr) +
               "_m" + std::to_string(m);
      if (m == 0) {
        const double cos0 = rep.cosine_with_constant(0);
        c.pass = (below == 1) && cos0 >= 0.999;
        c.detail = std::to_string(below) + " value(s) below 1e-6 sigma_max (need 1), "
                   "constant cosine " + detail::fmt(cos0) + " (need >= 0.999)";
      } else {
        c.pass = (below == 0);
        c.detail = std::to_string(below) +
                   " value(s) below 1e-6 sigma_max (need 0); smallest ratio " +
                   detail::fmt(rep.singular_values[0] / rep.sigma_max);
      }
      out.push_back(c);
    }
  }
  return out;
}

// ---- criterion 6: compatibility condition --------------------------------------
inline std::vector<CheckResult> check_compatibility() {
  const HelicalConfig cfg = make_config(2, 2.0, 1.0);
  const GridResolution res{128, 0, 16};
  const Grid g = build_grid(cfg, res);
  const double c = 1.0;
  const double exact = M_PI * cfg.R * cfg.R * c;
  HelicalProblem p = constant_preset(cfg, res, 2, c);
  const Eigen::VectorXd vol_density = detail::chart_volume_density(g);
  Eigen::VectorXd ftilde(g.field_size());
  for (int s = 0; s < g.spatial_size(); ++s)
    for (int l = 0; l < g.n_phi; ++l)
      ftilde[g.fidx(s, l)] = vol_density[s] * p.f[g.fidx(s, l)];
  const double vol_side = volume_quadrature(ftilde, g);
  const double bdry_side = boundary_quadrature(
      Eigen::VectorXd(detail::boundary_sigma_density(g).cwiseProduct(p.tau)), g);
  std::vector<CheckResult> out;
  const double e1 = std::abs(vol_side - exact) / exact;
  const double e2 = std::abs(bdry_side - exact) / exact;
  out.push_back({"compat_both_sides_pi_R2_c", e1 <= 1e-3 && e2 <= 1e-3,
                 "volume side " + detail::fmt(vol_side) + ", boundary side " +
                     detail::fmt(bdry_side) + ", exact " + detail::fmt(exact) +
                     ", rel errors " + detail::fmt(e1) + " / " + detail::fmt(e2) +
                     " (need <= 1e-3)"});
  bool rejected = false;
  std::string what;
  try {
    HelicalProblem bad = constant_preset(cfg, res, 2, c, false);
    solve_full(bad);
  } catch (const IncompatibleDataError& e) {
    rejected = true;
    what = e.what();
  }
  out.push_back({"compat_incompatible_rejected", rejected,
                 rejected ? "tau = 0 raised IncompatibleData as documented"
                          : "tau = 0 was not rejected"});
  return out;
}

// ---- criterion 7: divergence theorem -------------------------------------------
inline std::vector<CheckResult> check_stokes(int n, unsigned seed, int count = 50) {
  const HelicalConfig cfg = make_config(n, 2.0, 1.0);
  std::vector<GridResolution> ladder;
  if (n == 2)
    ladder = {{64, 0, 16}, {128, 0, 32}, {256, 0, 64}};
  else
    ladder = {{24, 16, 8}, {48, 32, 16}, {96, 64, 32}};
  std::vector<double> rms;
  for (const auto& res : ladder) {
    const Grid g = build_grid(cfg, res);
    double acc = 0.0;
    for (int t = 0; t < count; ++t) {
      const auto V = random_vector_density(g, seed + 31 * t);
      const double r = stokes_residual(V, g, cfg);
      acc += r * r;
    }
    rms.push_back(std::sqrt(acc / count));
  }
  std::vector<CheckResult> out;
  const double order = std::log2(rms[rms.size() - 2] / rms.back());
  out.push_back({"stokes_order_n" + std::to_string(n), order >= 1.8,
                 "RMS residual ladder " + detail::fmt(rms[0]) + " / " +
                     detail::fmt(rms[1]) + " / " + detail::fmt(rms[2]) +
                     ", final order " + detail::fmt(order) + " (need >= 1.8)"});

  std::mt19937_64 rng(seed + 999);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> pt;
    if (n == 2)
      pt = {cfg.R, unif(rng) * 2.0 * M_PI};
    else
      pt = {cfg.R, unif(rng) * M_PI, unif(rng) * 2.0 * M_PI};
    const std::vector<double> nv = conormal_spherical(pt, cfg);
    double err = std::abs(nv[0] - 1.0);
    for (int a = 1; a < n; ++a) err = std::max(err, std::abs(nv[a]));
    worst = std::max(worst, err);
  }
  out.push_back({"conormal_dr_n" + std::to_string(n), worst <= 1e-12,
                 "max deviation from dr over 1000 random boundary points " +
                     detail::fmt(worst) + " (need <= 1e-12)"});
  return out;
}

// ---- criterion 8: proof-multiplier boundary property ----------------------------
inline std::vector<CheckResult> check_multiplier_boundary(int n, unsigned seed,
                                                          int count = 100) {
  const HelicalConfig cfg = make_config(n, 2.0, 1.0);
  std::vector<GridResolution> ladder;
  if (n == 2)
    ladder = {{64, 0, 16}, {128, 0, 32}};
  else
    ladder = {{32, 16, 8}, {64, 32, 16}};
  std::vector<double> sup(2, 0.0), supscale(2, 0.0);
  for (size_t lev = 0; lev < ladder.size(); ++lev) {
    const Grid g = build_grid(cfg, ladder[lev]);
    for (int t = 0; t < count; ++t) {
      const Eigen::VectorXd u = random_bc_compatible_field(g, cfg, seed + 57 * t, 2);
      const Eigen::VectorXd bc = proof_multiplier_boundary_contraction(u, g, cfg);
      sup[lev] = std::max(sup[lev], bc.cwiseAbs().maxCoeff());
      // reference magnitude of the contraction's separate pieces
      const Eigen::VectorXd ur = d_dr_field(u, g), uphi = d_dphi_field(u, g);
      double sc = 0.0;
      for (int k = 0; k < g.boundary_size(); ++k)
        for (int l = 0; l < g.n_phi; ++l) {
          const int idx = g.fidx(g.sidx(g.J, k), l);
          sc = std::max(sc, std::abs(ur[idx]) + cfg.omega * std::abs(uphi[idx]));
        }
      supscale[lev] = std::max(supscale[lev], 2.0 / (cfg.n - 1.0) * cfg.R * sc);
    }
  }
  const Grid gf = build_grid(cfg, ladder.back());
  const double h2 = gf.h() * gf.h();
  std::vector<CheckResult> out;
  const double factor = sup[0] / sup[1];
  out.push_back({"multiplier_boundary_halving_n" + std::to_string(n), factor >= 3.5,
                 "sup |b.grad u| on boundary " + detail::fmt(sup[0]) + " -> " +
                     detail::fmt(sup[1]) + ", factor " + detail::fmt(factor) +
                     " (need >= 3.5)"});
  const double bound = 50.0 * h2 * supscale[1];
  out.push_back({"multiplier_boundary_magnitude_n" + std::to_string(n),
                 sup[1] <= bound,
                 "sup " + detail::fmt(sup[1]) + " vs 50 h^2 scale = " +
                     detail::fmt(bound)});
  return out;
}

}  // namespace helical

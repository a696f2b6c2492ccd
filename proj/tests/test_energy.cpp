#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helical/energy.hpp"
#include "helical/presets.hpp"
#include "helical/solve.hpp"

using namespace helical;

TEST_CASE("energy of a constant field vanishes") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const Grid g = build_grid(cfg, {32, 0, 8});
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(g.field_size(), 4.2);
  const auto mult = random_multiplier(g, 9);
  CHECK(std::abs(energy_direct(u, mult, g, cfg)) <= 1e-12);
}

TEST_CASE("compactly supported field inside the light cylinder") {
  // a = -1, b = 0: E = int h^{ab} u_a u_b > 0 where chi > 0, and the
  // expanded boundary term vanishes
  const auto cfg = make_config(2, 2.0, 1.0);  // cylinder at rho = 0.5
  const Grid g = build_grid(cfg, {128, 0, 16});
  Eigen::VectorXd u(g.field_size());
  for (int j = 0; j <= g.J; ++j) {
    const double x = (g.r[j] - 0.1) / 0.3;  // support [0.1, 0.4], inside
    const double bump = (x > 0 && x < 1) ? std::pow(x * (1 - x), 4) : 0.0;
    for (int l = 0; l < g.n_phi; ++l)
      u[g.fidx(j, l)] = bump * (1.0 + 0.5 * std::cos(g.phi[l]));
  }
  Multiplier mult;
  mult.a = Eigen::VectorXd::Constant(g.field_size(), -1.0);
  mult.b_rho = Eigen::VectorXd::Zero(g.field_size());
  mult.b_phi = Eigen::VectorXd::Zero(g.field_size());
  const double E = energy_direct(u, mult, g, cfg);
  const auto [vol, bdry] = energy_expanded(u, mult, g, cfg);
  CHECK(E > 0.0);
  CHECK(std::abs(bdry) <= 1e-10 * std::abs(vol));
  CHECK(E == Catch::Approx(vol).epsilon(0.02));
}

TEST_CASE("n=3 energy of a radial bump matches the 1D reduction") {
  // for radial u(r), a = -1, b = 0 and compact support:
  //   E = int_B rho (u_rho^2 + u_z^2) = 4 pi int r^2 u'(r)^2 dr
  const auto cfg = make_config(3, 2.0, 1.0);
  const Grid g = build_grid(cfg, {96, 64, 8});
  const double a = 0.15, b = 0.8;
  auto bump = [&](double r) {
    const double x = (r - a) / (b - a);
    return (x > 0 && x < 1) ? std::pow(x * (1 - x), 4) : 0.0;
  };
  auto dbump = [&](double r) {
    const double x = (r - a) / (b - a);
    return (x > 0 && x < 1)
               ? 4.0 * std::pow(x * (1 - x), 3) * (1 - 2 * x) / (b - a)
               : 0.0;
  };
  Eigen::VectorXd u(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k)
      for (int l = 0; l < g.n_phi; ++l)
        u[g.fidx(g.sidx(j, k), l)] = bump(g.r[j]);
  Multiplier mult;
  mult.a = Eigen::VectorXd::Constant(g.field_size(), -1.0);
  mult.b_rho = Eigen::VectorXd::Zero(g.field_size());
  mult.b_phi = Eigen::VectorXd::Zero(g.field_size());
  mult.b_z = Eigen::VectorXd::Zero(g.field_size());
  // independent oracle: fine composite Simpson of the 1D reduction
  double exact = 0.0;
  const int N = 200000;
  const double h = 1.0 / N;
  for (int i = 0; i <= N; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    exact += w * r * r * dbump(r) * dbump(r);
  }
  exact *= 4.0 * M_PI * h / 3.0;
  CHECK(energy_direct(u, mult, g, cfg) == Catch::Approx(exact).epsilon(5e-3));
}

TEST_CASE("ibp residual vanishes for the zero field and converges otherwise") {
  for (int n : {2, 3}) {
    const auto cfg = make_config(n, 2.0, 1.0);
    double prev = 0.0;
    for (int lev = 0; lev < 2; ++lev) {
      const GridResolution res = (n == 2)
                                     ? GridResolution{64 << lev, 0, 16 << lev}
                                     : GridResolution{32 << lev, 16 << lev, 8 << lev};
      const Grid g = build_grid(cfg, res);
      CHECK(ibp_residual(Eigen::VectorXd::Zero(g.field_size()),
                         random_multiplier(g, 3), g, cfg) == 0.0);
      double rms = 0.0;
      for (unsigned seed = 1; seed <= 5; ++seed) {
        const auto t = energy_test_triple(g, seed);
        rms += std::pow(ibp_residual(t.u, t.mult, g, cfg), 2);
      }
      rms = std::sqrt(rms / 5);
      if (lev == 1) CHECK(prev / rms >= 3.3);
      prev = rms;
    }
  }
}

TEST_CASE("proof volume integrand") {
  const auto cfg2 = make_config(2, 1.0, 2.0);
  CHECK(proof_volume_integrand(0.7, 0.0, 0.0, cfg2) == 0.0);
  // n=2, rho=1, omega=1, u_rho=1, u_phi=1: 1 [1 + (1+1) 1] = 3
  CHECK(proof_volume_integrand(1.0, 1.0, 1.0, cfg2) == Catch::Approx(3.0));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::uniform_real_distribution<double> upos(1e-9, 2.0);
  const auto cfg3 = make_config(3, 1.4, 2.0);
  for (int i = 0; i < 100000; ++i) {
    CHECK(proof_volume_integrand(upos(rng), unif(rng), unif(rng), cfg2) >= 0.0);
    CHECK(proof_volume_integrand(upos(rng), unif(rng), unif(rng), cfg3,
                                 unif(rng)) >= 0.0);
  }
  CHECK_THROWS_AS(proof_volume_integrand(0.0, 1.0, 1.0, cfg2), std::domain_error);
}

TEST_CASE("proof boundary integrand: equality cases and the chain") {
  const double R = 1.3, omega = 1.7;
  const auto cfg3 = make_config(3, omega, R);
  // equator z = 0: integrand = 1/2 [R^2 u_1^2 + u_phi^2] = lower bound
  {
    const auto bi = proof_boundary_integrand(R, 0.0, 0.8, -0.4, cfg3);
    const double expect = 0.5 * (R * R * 0.64 + 0.16);
    CHECK(bi.integrand == Catch::Approx(expect).epsilon(1e-13));
    CHECK(std::abs(bi.integrand - bi.lower_bound) <=
          1e-13 * std::abs(bi.integrand));
  }
  // all derivatives zero
  {
    const auto bi = proof_boundary_integrand(R, 0.0, 0.0, 0.0, cfg3);
    CHECK(bi.integrand == 0.0);
    CHECK(bi.lower_bound == 0.0);
  }
  // random on-sphere samples, both signs, n in {2, 3, 4}
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  std::uniform_real_distribution<double> uang(1e-3, M_PI - 1e-3);
  for (int i = 0; i < 100000; ++i) {
    const int sgn = (i % 2) ? 1 : -1;
    const int n = 2 + i % 3;
    const double alpha = uang(rng);
    // for n = 2 the boundary circle is rho = R itself
    const double rho = (n == 2) ? R : R * std::sin(alpha);
    const double zmag = (n == 2) ? 0.0 : R * std::cos(alpha);
    double zv[2] = {zmag, 0.0}, uv[2] = {unif(rng), unif(rng)};
    if (n == 4) {
      const double beta = unif(rng);
      zv[0] = zmag * std::cos(beta);
      zv[1] = zmag * std::sin(beta);
    }
    const auto bi = proof_boundary_integrand(
        rho, std::span<const double>(zv, n - 2), std::span<const double>(uv, n - 2),
        unif(rng), n, R, omega, sgn);
    const double scale = std::abs(bi.integrand) + std::abs(bi.lower_bound) + 1.0;
    CHECK(bi.integrand - bi.lower_bound >= -1e-12 * scale);
    CHECK(bi.lower_bound >= 0.0);
  }
  // off-sphere rejection
  CHECK_THROWS_AS(proof_boundary_integrand(R, 0.5, 1.0, 1.0, cfg3),
                  std::domain_error);
}

TEST_CASE("boundary integrand is invariant under rotations of the z block") {
  // synthetic n = 4 samples: rotate (z_i, u_i) by the same SO(2) element
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const double R = 1.0, omega = 2.0;
  for (int i = 0; i < 2000; ++i) {
    const double alpha = 0.3 + 0.4 * (i % 7);
    const double rho = R * std::sin(alpha), zmag = R * std::cos(alpha);
    const double beta = unif(rng);
    double zv[2] = {zmag * std::cos(beta), zmag * std::sin(beta)};
    double uv[2] = {unif(rng), unif(rng)};
    const double uphi = unif(rng);
    const auto base = proof_boundary_integrand(
        rho, std::span<const double>(zv, 2), std::span<const double>(uv, 2), uphi,
        4, R, omega, 1);
    const double t = unif(rng);
    const double ct = std::cos(t), st = std::sin(t);
    double zr[2] = {ct * zv[0] - st * zv[1], st * zv[0] + ct * zv[1]};
    double ur[2] = {ct * uv[0] - st * uv[1], st * uv[0] + ct * uv[1]};
    const auto rot = proof_boundary_integrand(
        rho, std::span<const double>(zr, 2), std::span<const double>(ur, 2), uphi,
        4, R, omega, 1);
    const double scale = std::abs(base.integrand) + 1.0;
    CHECK(std::abs(rot.integrand - base.integrand) <= 1e-13 * scale);
    CHECK(std::abs(rot.lower_bound - base.lower_bound) <= 1e-12 * scale);
  }
  // n = 3: the only orthogonal maps are +-1 on the single z direction
  const auto cfg3 = make_config(3, omega, R);
  const auto a = proof_boundary_integrand(0.6, 0.8, 1.1, -0.7, cfg3);
  const auto b = proof_boundary_integrand(0.6, -0.8, -1.1, -0.7, cfg3);
  CHECK(a.integrand == Catch::Approx(b.integrand).epsilon(1e-14));
  CHECK(a.lower_bound == Catch::Approx(b.lower_bound).epsilon(1e-14));
}

TEST_CASE("proof multiplier contraction vanishes on homogeneous-BC fields") {
  for (int n : {2, 3}) {
    const auto cfg = make_config(n, 2.0, 1.0);
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
      const GridResolution res = (n == 2)
                                     ? GridResolution{48 << lev, 0, 8 << lev}
                                     : GridResolution{24 << lev, 16 << lev, 8 << lev};
      const Grid g = build_grid(cfg, res);
      sup[lev] = 0.0;
      for (unsigned seed = 1; seed <= 10; ++seed) {
        const Eigen::VectorXd u = random_bc_compatible_field(g, cfg, seed * 31, 2);
        sup[lev] = std::max(
            sup[lev],
            proof_multiplier_boundary_contraction(u, g, cfg).cwiseAbs().maxCoeff());
      }
    }
    CHECK(sup[0] / sup[1] >= 3.4);
  }
}

TEST_CASE("proof multiplier has the advertised coefficients") {
  const auto cfg = make_config(3, 1.5, 2.0);
  const Grid g = build_grid(cfg, {24, 16, 8});
  const Multiplier m = proof_multiplier(g, cfg);
  const int idx = g.fidx(g.sidx(8, 5), 3);
  CHECK(m.a[idx] == -1.0);
  CHECK(m.b_rho[idx] == Catch::Approx(-g.rho(8, 5)));  // 2/(1-3) = -1
  CHECK(m.b_z[idx] == Catch::Approx(-g.z(8, 5)));
  CHECK(m.b_phi[idx] == Catch::Approx(-cfg.sign * cfg.R * cfg.omega));
}

TEST_CASE("energy report bundles the identity and integrand minima") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const Grid g = build_grid(cfg, {48, 0, 8});
  const auto t = energy_test_triple(g, 4);
  const EnergyReport rep = energy_report(t.u, t.mult, g, cfg);
  CHECK(rep.ibp_residual ==
        std::abs(rep.E_direct - rep.volume_term - rep.boundary_term));
  CHECK(rep.min_volume_integrand >= 0.0);
  CHECK(rep.min_boundary_gap >= -1e-12);
}

TEST_CASE("uniqueness certificate") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const GridResolution res{48, 0, 8};
  const Grid g = build_grid(cfg, res);
  const HelicalProblem p = random_problem(cfg, res, 2, 3);
  const FullSolution sol = solve_full(p);
  REQUIRE(sol.ok);

  // adding a constant is invisible
  {
    const Eigen::VectorXd shifted = sol.u.array() + 7.0;
    const auto cert = uniqueness_certificate(sol.u, shifted, g, cfg);
    const double scale = cert.scale + 1e-300;
    CHECK(cert.grad_max <= 1e-12 * scale);
    CHECK(cert.mean_adjusted_sup <= 1e-12 * scale);
    CHECK(std::abs(cert.noneg_volume) <= 1e-20);
    CHECK(std::abs(cert.noneg_boundary) <= 1e-20);
  }
  // a non-constant perturbation is detected at its own scale
  {
    Eigen::VectorXd bent = sol.u;
    const double eps = 1e-3;
    for (int j = 0; j <= g.J; ++j)
      for (int l = 0; l < g.n_phi; ++l)
        bent[g.fidx(j, l)] += eps * g.r[j] * g.r[j];
    const auto cert = uniqueness_certificate(sol.u, bent, g, cfg);
    CHECK(cert.grad_max >= 0.5 * eps);
    CHECK(cert.noneg_volume > 0.0);
  }
  // problem-level convenience overload
  const auto cert = uniqueness_certificate(sol.u, sol.u, p);
  CHECK(cert.grad_max == 0.0);
}

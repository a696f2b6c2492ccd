#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helical/grid.hpp"
#include "helical/presets.hpp"
#include "helical/quadrature.hpp"

using namespace helical;

TEST_CASE("grid construction and light-cylinder bookkeeping") {
  {
    const auto cfg = make_config(2, 1.0, 2.0);
    const Grid g = build_grid(cfg, {64, 0, 8});
    CHECK(g.r.size() == 65);
    CHECK(g.r[64] == 2.0);
    CHECK(g.light_cylinder_interior);
    CHECK(g.nodes_inside_lc >= 8);
    CHECK(g.nodes_outside_lc >= 8);
  }
  {
    // fully elliptic: R < 1/omega
    const auto cfg = make_config(2, 1.0, 0.5);
    const Grid g = build_grid(cfg, {32, 0, 8});
    CHECK_FALSE(g.light_cylinder_interior);
  }
  {
    const auto cfg = make_config(3, 1.0, 2.0);
    const Grid g = build_grid(cfg, {64, 48, 8});
    CHECK(g.boundary_size() == 49);
    CHECK(g.spatial_size() == 65 * 49);
  }
  {
    // too coarse to resolve the crossing at r = 1/omega = 0.25
    const auto cfg = make_config(2, 4.0, 2.0);
    CHECK_THROWS_AS(build_grid(cfg, {16, 0, 8}), std::invalid_argument);
  }
}

TEST_CASE("volume quadrature on the disk") {
  const auto cfg = make_config(2, 1.0, 1.0);
  const Grid g = build_grid(cfg, {64, 0, 16});
  // sigma = rho integrates to pi (trapezoid is exact on linear densities)
  Eigen::VectorXd sigma(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int l = 0; l < g.n_phi; ++l) sigma[g.fidx(j, l)] = g.r[j];
  CHECK(volume_quadrature(sigma, g) == Catch::Approx(M_PI).epsilon(1e-12));
  CHECK(volume_quadrature(Eigen::VectorXd::Zero(g.field_size()), g) == 0.0);
  // rho c over radius R
  const auto cfg2 = make_config(2, 1.0, 1.7);
  const Grid g2 = build_grid(cfg2, {64, 0, 16});
  const double c = 2.3;
  Eigen::VectorXd d(g2.field_size());
  for (int j = 0; j <= g2.J; ++j)
    for (int l = 0; l < g2.n_phi; ++l) d[g2.fidx(j, l)] = c * g2.r[j];
  CHECK(volume_quadrature(d, g2) ==
        Catch::Approx(M_PI * 1.7 * 1.7 * c).epsilon(1e-12));
  CHECK_THROWS_AS(volume_quadrature(Eigen::VectorXd::Zero(3), g),
                  std::invalid_argument);
}

TEST_CASE("volume quadrature on the ball converges at second order") {
  const auto cfg = make_config(3, 1.0, 1.0);
  double prev = 0.0;
  for (int lev = 0; lev < 2; ++lev) {
    const int J = 32 << lev, K = 24 << lev;
    const Grid g = build_grid(cfg, {J, K, 8});
    Eigen::VectorXd d(g.field_size());
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k <= g.K; ++k)
        for (int l = 0; l < g.n_phi; ++l)
          d[g.fidx(g.sidx(j, k), l)] =
              g.r[j] * g.r[j] * std::sin(g.theta[k]) * std::cos(g.z(j, k));
    // exact: int r^2 sin(th) cos(r cos th) over the chart
    const double exact = 4.0 * M_PI * (std::sin(1.0) - std::cos(1.0));
    const double err = std::abs(volume_quadrature(d, g) - exact);
    if (lev == 1) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("quadrature exactness on degree-1 densities") {
  const auto cfg = make_config(3, 1.0, 1.0);
  const Grid g = build_grid(cfg, {20, 18, 8});
  Eigen::VectorXd d(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k)
      for (int l = 0; l < g.n_phi; ++l)
        d[g.fidx(g.sidx(j, k), l)] = 2.0 + 3.0 * g.r[j] - 0.5 * g.theta[k];
  const double exact =
      2.0 * M_PI * (2.0 * M_PI + 3.0 * 0.5 * M_PI - 0.5 * M_PI * M_PI / 2.0);
  CHECK(volume_quadrature(d, g) == Catch::Approx(exact).epsilon(1e-13));
}

TEST_CASE("boundary quadrature") {
  // n = 2: sigma tau with sigma = R, tau = c R / 2 integrates to pi R^2 c
  const auto cfg = make_config(2, 1.0, 1.4);
  const Grid g = build_grid(cfg, {32, 0, 16});
  const double c = 0.7, R = cfg.R;
  Eigen::VectorXd d = Eigen::VectorXd::Constant(g.boundary_field_size(),
                                                R * c * R / 2.0);
  CHECK(boundary_quadrature(d, g) == Catch::Approx(M_PI * R * R * c).epsilon(1e-13));
  CHECK(boundary_quadrature(Eigen::VectorXd::Zero(g.boundary_field_size()), g) ==
        0.0);

  // n = 3: integrand sin(theta) integrates to 4 pi over the parametrization
  const auto cfg3 = make_config(3, 1.0, 1.0);
  const Grid g3 = build_grid(cfg3, {16, 48, 16});
  Eigen::VectorXd s(g3.boundary_field_size());
  for (int k = 0; k <= g3.K; ++k)
    for (int l = 0; l < g3.n_phi; ++l)
      s[g3.bidx(k, l)] = std::sin(g3.theta[k]);
  CHECK(boundary_quadrature(s, g3) == Catch::Approx(4.0 * M_PI).epsilon(1e-3));
}

TEST_CASE("Stokes residual: compactly supported density") {
  const auto cfg = make_config(2, 1.0, 1.0);
  const Grid g = build_grid(cfg, {128, 0, 16});
  // V^r supported away from the boundary: residual equals |int div V| = O(h^2)
  std::vector<Eigen::VectorXd> V(2, Eigen::VectorXd::Zero(g.field_size()));
  for (int j = 0; j <= g.J; ++j) {
    const double x = (g.r[j] - 0.3) / 0.4;
    const double bump = (x > 0 && x < 1) ? std::pow(x * (1 - x), 4) : 0.0;
    for (int l = 0; l < g.n_phi; ++l) V[0][g.fidx(j, l)] = bump;
  }
  CHECK(stokes_residual(V, g, cfg) <= 1e-5);
}

TEST_CASE("Stokes residual: radial polynomial with analytic sides") {
  const auto cfg = make_config(2, 1.0, 1.0);
  double prev = 0.0;
  for (int lev = 0; lev < 2; ++lev) {
    const Grid g = build_grid(cfg, {64 << lev, 0, 16});
    std::vector<Eigen::VectorXd> V(2, Eigen::VectorXd::Zero(g.field_size()));
    for (int j = 0; j <= g.J; ++j)
      for (int l = 0; l < g.n_phi; ++l)
        V[0][g.fidx(j, l)] = std::pow(g.r[j], 4) - 0.5 * g.r[j] * g.r[j];
    const double res = stokes_residual(V, g, cfg);
    if (lev == 1) CHECK(prev / res >= 3.5);
    prev = res;
  }
}

TEST_CASE("Stokes residual drops under refinement for random densities") {
  // the full threshold (>= 3.5 per halving) is asserted at the acceptance
  // suite's finer grids; this coarse smoke check allows preasymptotics
  for (int n : {2, 3}) {
    const auto cfg = make_config(n, 1.0, 1.0);
    double rms[2] = {0.0, 0.0};
    for (int lev = 0; lev < 2; ++lev) {
      const Grid g = (n == 2) ? build_grid(cfg, {64 << lev, 0, 8 << lev})
                              : build_grid(cfg, {32 << lev, 24 << lev, 8 << lev});
      for (unsigned seed = 0; seed < 10; ++seed) {
        const auto V = random_vector_density(g, 100 + seed);
        rms[lev] += std::pow(stokes_residual(V, g, cfg), 2);
      }
      rms[lev] = std::sqrt(rms[lev] / 10);
    }
    CHECK(rms[0] / rms[1] >= 3.2);
  }
}

TEST_CASE("sigma weights and sigma mean") {
  const auto cfg = make_config(3, 1.0, 1.0);
  const Grid g = build_grid(cfg, {24, 16, 8});
  // sum of sigma weights ~ ball sigma-measure / (2 pi), to O(h^2)
  CHECK(sigma_weights(g).sum() * 2.0 * M_PI ==
        Catch::Approx(4.0 * M_PI / 3.0).epsilon(5e-3));
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(g.field_size(), 1.75);
  CHECK(sigma_mean(c, g) == Catch::Approx(1.75).epsilon(1e-13));
}

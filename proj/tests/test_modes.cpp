#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helical/grid.hpp"
#include "helical/modes.hpp"
#include "helical/operators.hpp"

using namespace helical;

namespace {
Eigen::VectorXd phi_grid(int nphi) {
  Eigen::VectorXd phi(nphi);
  for (int l = 0; l < nphi; ++l) phi[l] = 2.0 * M_PI * l / nphi;
  return phi;
}
}  // namespace

TEST_CASE("analysis of simple fields") {
  const int nphi = 16;
  const auto phi = phi_grid(nphi);
  {
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(nphi, 3.25);
    const Eigen::VectorXcd m = analyze_phi(c, 3);
    CHECK(std::abs(m[3] - Complex(3.25, 0.0)) <= 1e-14);
    for (int i : {0, 1, 2, 4, 5, 6}) CHECK(std::abs(m[i]) <= 1e-14);
  }
  {
    const Eigen::VectorXd c = phi.array().cos();
    const Eigen::VectorXcd m = analyze_phi(c, 2);
    CHECK(std::abs(m[1] - Complex(0.5, 0.0)) <= 1e-14);  // m = -1
    CHECK(std::abs(m[3] - Complex(0.5, 0.0)) <= 1e-14);  // m = +1
    CHECK(std::abs(m[2]) <= 1e-14);
  }
}

TEST_CASE("synthesis of simple coefficient sets") {
  const int nphi = 12;
  const auto phi = phi_grid(nphi);
  {
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(5);
    m[2] = Complex(1.0, 0.0);
    const Eigen::VectorXd f = synthesize_phi(m, nphi);
    for (int l = 0; l < nphi; ++l) CHECK(f[l] == Catch::Approx(1.0));
  }
  {
    // u_{+1} = -i/2, u_{-1} = +i/2  ->  sin(phi)
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(3);
    m[2] = Complex(0.0, -0.5);
    m[0] = Complex(0.0, 0.5);
    const Eigen::VectorXd f = synthesize_phi(m, nphi);
    for (int l = 0; l < nphi; ++l)
      CHECK(f[l] == Catch::Approx(std::sin(phi[l])).margin(1e-14));
  }
}

TEST_CASE("round trip on band-limited data") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int M = 1 + trial % 5;
    const int nphi = 2 * M + 1 + trial % 7;
    Eigen::VectorXcd modes = Eigen::VectorXcd::Zero(2 * M + 1);
    modes[M] = Complex(unif(rng), 0.0);
    for (int m = 1; m <= M; ++m) {
      modes[M + m] = Complex(unif(rng), unif(rng));
      modes[M - m] = std::conj(modes[M + m]);
    }
    const Eigen::VectorXd f = synthesize_phi(modes, nphi);
    const Eigen::VectorXcd back = analyze_phi(f, M);
    CHECK((back - modes).norm() <= 1e-13 * modes.norm());
    // conjugate symmetry of analysis on real input
    for (int m = 0; m <= M; ++m)
      CHECK(std::abs(back[M - m] - std::conj(back[M + m])) <= 1e-13);
  }
}

TEST_CASE("mode transform error paths") {
  CHECK_THROWS_AS(analyze_phi(Eigen::VectorXd::Zero(6), 3), std::invalid_argument);
  Eigen::VectorXcd bad = Eigen::VectorXcd::Zero(3);
  bad[2] = Complex(1.0, 0.0);  // u_{+1} with no conjugate partner
  CHECK_THROWS_AS(synthesize_phi(bad, 8), std::invalid_argument);
}

TEST_CASE("mode operator on n=2 fields with known action") {
  const auto cfg = make_config(2, 1.0, 2.0);
  const Grid g = build_grid(cfg, {64, 0, 8});

  // constants are annihilated (m = 0)
  {
    ModeField c{0, Eigen::VectorXcd::Constant(g.spatial_size(), 2.5)};
    const Eigen::VectorXcd r = mode_operator_apply(c, g, cfg);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-14);
  }
  // m = 0, u = rho^2/4: d_rho(rho u') = rho, exactly at the stencil level
  {
    ModeField u{0, Eigen::VectorXcd(g.spatial_size())};
    for (int j = 0; j <= g.J; ++j) u.values[j] = 0.25 * g.r[j] * g.r[j];
    const Eigen::VectorXcd r = mode_operator_apply(u, g, cfg);
    for (int j = 1; j < g.J; ++j)
      CHECK(std::abs(r[j] - g.r[j]) <= 1e-12);
  }
  // m = 1, u = rho: residual 1 - chi = omega^2 rho^2
  {
    ModeField u{1, Eigen::VectorXcd(g.spatial_size())};
    for (int j = 0; j <= g.J; ++j) u.values[j] = g.r[j];
    const Eigen::VectorXcd r = mode_operator_apply(u, g, cfg);
    for (int j = 1; j < g.J; ++j) {
      const double want = cfg.omega * cfg.omega * g.r[j] * g.r[j];
      CHECK(std::abs(r[j] - want) <= 1e-12);
    }
  }
}

TEST_CASE("mode operator linearity and conjugate-mode consistency") {
  const auto cfg = make_config(3, 1.2, 1.5);
  const Grid g = build_grid(cfg, {24, 16, 8});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd a(g.spatial_size()), b(g.spatial_size());
  for (int i = 0; i < g.spatial_size(); ++i) {
    a[i] = Complex(unif(rng), unif(rng));
    b[i] = Complex(unif(rng), unif(rng));
  }
  const Complex alpha(0.7, -0.3), beta(-1.1, 0.2);
  for (int m : {0, 1, 3}) {
    const Eigen::VectorXcd ra = mode_operator_apply({m, a}, g, cfg);
    const Eigen::VectorXcd rb = mode_operator_apply({m, b}, g, cfg);
    const Eigen::VectorXcd rc =
        mode_operator_apply({m, alpha * a + beta * b}, g, cfg);
    CHECK((rc - alpha * ra - beta * rb).cwiseAbs().maxCoeff() <=
          1e-13 * (ra.cwiseAbs().maxCoeff() + rb.cwiseAbs().maxCoeff() + 1.0));
    // conjugate-mode consistency
    const Eigen::VectorXcd rm = mode_operator_apply({-m, a.conjugate()}, g, cfg);
    CHECK((rm - ra.conjugate()).cwiseAbs().maxCoeff() <=
          1e-13 * (ra.cwiseAbs().maxCoeff() + 1.0));
  }
}

TEST_CASE("Sommerfeld boundary residual") {
  const auto cfg = make_config(2, 1.5, 1.0);
  const Grid g = build_grid(cfg, {64, 0, 8});
  const Eigen::VectorXcd tau0 = Eigen::VectorXcd::Zero(1);

  // constant field, m = 0: zero residual
  {
    ModeField u{0, Eigen::VectorXcd::Constant(g.spatial_size(), 1.0)};
    CHECK(mode_boundary_residual(u, tau0, g, cfg).cwiseAbs().maxCoeff() <= 1e-14);
  }
  // u = rho^2/4, tau = R/2: the quadratic is differenced exactly
  {
    ModeField u{0, Eigen::VectorXcd(g.spatial_size())};
    for (int j = 0; j <= g.J; ++j) u.values[j] = 0.25 * g.r[j] * g.r[j];
    Eigen::VectorXcd tau = Eigen::VectorXcd::Constant(1, cfg.R / 2.0);
    CHECK(mode_boundary_residual(u, tau, g, cfg).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // constant field, m = 1, sign = +1: residual is i omega
  {
    ModeField u{1, Eigen::VectorXcd::Constant(g.spatial_size(), 1.0)};
    const Eigen::VectorXcd r = mode_boundary_residual(u, tau0, g, cfg);
    CHECK(std::abs(r[0] - Complex(0.0, cfg.omega)) <= 1e-14);
  }
  // tau length mismatch
  {
    ModeField u{0, Eigen::VectorXcd::Zero(g.spatial_size())};
    CHECK_THROWS_AS(mode_boundary_residual(u, Eigen::VectorXcd::Zero(5), g, cfg),
                    std::invalid_argument);
  }
}

TEST_CASE("Euler radial identity under refinement") {
  // (1/R)(rho u_rho + z u_z) against u_r, both by independent second-order
  // differences of closed-form fields; the discrepancy must drop >= 3.5x
  // per halving.
  const auto cfg = make_config(3, 1.0, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst[2] = {0.0, 0.0};
  for (int trial = 0; trial < 100; ++trial) {
    const double c1 = unif(rng), c2 = unif(rng), c3 = unif(rng);
    auto u = [&](double rho, double z) {
      return c1 * rho * rho + c2 * z * z * z + c3 * rho * rho * z;
    };
    for (int lev = 0; lev < 2; ++lev) {
      const double h = (lev == 0) ? 0.02 : 0.01;
      for (int k = 1; k < 16; ++k) {
        const double th = M_PI * k / 16.0;
        const double rho = cfg.R * std::sin(th), z = cfg.R * std::cos(th);
        const double urho = (u(rho + h, z) - u(rho - h, z)) / (2 * h);
        const double uz = (u(rho, z + h) - u(rho, z - h)) / (2 * h);
        auto ur_of = [&](double rr) {
          return u(rr * std::sin(th), rr * std::cos(th));
        };
        const double ur = (3 * ur_of(cfg.R) - 4 * ur_of(cfg.R - h) +
                           ur_of(cfg.R - 2 * h)) /
                          (2 * h);
        const double euler = (rho * urho + z * uz) / cfg.R;
        worst[lev] = std::max(worst[lev], std::abs(euler - ur));
      }
    }
  }
  CHECK(worst[0] / worst[1] >= 3.5);
}

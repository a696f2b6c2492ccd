#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "helical/energy.hpp"
#include "helical/grid.hpp"
#include "helical/quadrature.hpp"
#include "helical/solve.hpp"

namespace helical {

// ---- small bivariate polynomial calculus in (rho, z) ----------------------
//
// Carries one Fourier mode profile and supports the exact application of the
// per-mode operator, so manufactured sources and boundary data are analytic
// rather than sampled from finite differences.
struct BivarPoly {
  Eigen::MatrixXcd c;  // term c(i,j) rho^i z^j

  static BivarPoly zero(int ni = 1, int nj = 1) {
    BivarPoly p;
    p.c = Eigen::MatrixXcd::Zero(ni, nj);
    return p;
  }
  Complex eval(double rho, double z) const {
    Complex acc(0.0, 0.0);
    for (int j = static_cast<int>(c.cols()) - 1; j >= 0; --j) {
      Complex row(0.0, 0.0);
      for (int i = static_cast<int>(c.rows()) - 1; i >= 0; --i)
        row = row * rho + c(i, j);
      acc = acc * z + row;
    }
    return acc;
  }
  BivarPoly d_rho() const {
    BivarPoly p = zero(std::max<int>(1, c.rows() - 1), c.cols());
    for (int i = 1; i < c.rows(); ++i)
      for (int j = 0; j < c.cols(); ++j) p.c(i - 1, j) = double(i) * c(i, j);
    return p;
  }
  BivarPoly d_z() const {
    BivarPoly p = zero(c.rows(), std::max<int>(1, c.cols() - 1));
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 1; j < c.cols(); ++j) p.c(i, j - 1) = double(j) * c(i, j);
    return p;
  }
  BivarPoly mul_rho(int power = 1) const {
    BivarPoly p = zero(c.rows() + power, c.cols());
    p.c.bottomRows(c.rows()) = c;
    return p;
  }
  // division by rho; the rho^0 coefficients must vanish identically
  BivarPoly div_rho() const {
    const double scale = c.cwiseAbs().maxCoeff();
    for (int j = 0; j < c.cols(); ++j)
      if (std::abs(c(0, j)) > 1e-12 * std::max(scale, 1.0))
        throw std::logic_error("BivarPoly::div_rho: profile not divisible by rho");
    BivarPoly p = zero(std::max<int>(1, c.rows() - 1), c.cols());
    for (int i = 1; i < c.rows(); ++i) p.c.row(i - 1) = c.row(i);
    return p;
  }
  BivarPoly operator+(const BivarPoly& o) const {
    BivarPoly p = zero(std::max(c.rows(), o.c.rows()), std::max(c.cols(), o.c.cols()));
    p.c.topLeftCorner(c.rows(), c.cols()) = c;
    p.c.topLeftCorner(o.c.rows(), o.c.cols()) += o.c;
    return p;
  }
  BivarPoly operator*(Complex s) const {
    BivarPoly p = *this;
    p.c *= s;
    return p;
  }
};

// f_tilde = d_rho(rho du/drho) [+ rho d2u/dz2] - m^2 (1/rho - w^2 rho) u,
// exact in the polynomial algebra (the rho^{m-1} terms cancel identically
// for admissible profiles u = rho^{|m|} P(rho^2, z)).
inline BivarPoly mode_source_density(const BivarPoly& u, int m, double omega,
                                     bool with_z) {
  BivarPoly ft = u.d_rho().mul_rho().d_rho();
  if (with_z) ft = ft + u.d_z().d_z().mul_rho();
  const double m2 = double(m) * m;
  if (m != 0) {
    ft = ft + u.div_rho() * Complex(-m2, 0.0);
    ft = ft + u.mul_rho() * Complex(m2 * omega * omega, 0.0);
  }
  return ft;
}

// ---- deterministic manufactured solution -----------------------------------
//
// Smooth per-mode profiles u_m = rho^m P_m(rho^2, z), the source computed by
// exact operator application (then unweighted: f = f_tilde / sigma), the
// boundary data from analytic radial derivatives.  Modes m < 0 follow by
// conjugation, so the synthesized field is real.
class ManufacturedSolution {
 public:
  ManufacturedSolution(const HelicalConfig& cfg, int kmax)
      : cfg_(cfg), kmax_(kmax) {
    cfg.validate();
    if (kmax < 0) throw std::invalid_argument("ManufacturedSolution: kmax < 0");
    const double R = cfg.R;
    for (int m = 0; m <= kmax; ++m) {
      // rho^m (a + b (rho^2 + z^2)/R^2 + c z/R), complex for m >= 1
      const double amp = 1.0 / (1.0 + m);
      const Complex a = (m == 0) ? Complex(1.0, 0.0) : Complex(1.0, 0.4 / m);
      const Complex b = (m == 0) ? Complex(-0.6, 0.0) : Complex(-0.5, 0.15);
      const Complex cz = (m == 0) ? Complex(0.35, 0.0) : Complex(0.3, -0.2);
      BivarPoly P = BivarPoly::zero(3, 3);
      P.c(0, 0) = a;
      P.c(2, 0) = b / (R * R);
      if (cfg.n == 3) {
        P.c(0, 2) = b / (R * R);
        P.c(0, 1) = cz / R;
      }
      u_.push_back((P * Complex(amp, 0.0)).mul_rho(m));
      ft_.push_back(mode_source_density(u_.back(), m, cfg.omega, cfg.n == 3));
      f_.push_back(ft_.back().div_rho());
    }
  }

  int kmax() const { return kmax_; }
  const HelicalConfig& config() const { return cfg_; }

  Complex u_at(int m, double rho, double z) const {
    return m >= 0 ? u_[m].eval(rho, z) : std::conj(u_[-m].eval(rho, z));
  }
  Complex f_at(int m, double rho, double z) const {
    return m >= 0 ? f_[m].eval(rho, z) : std::conj(f_[-m].eval(rho, z));
  }
  // tau_m = u_r + i sign m omega u at r = R
  Complex tau_at(int m, double theta) const {
    const int ma = std::abs(m);
    const double rho = (cfg_.n == 3) ? cfg_.R * std::sin(theta) : cfg_.R;
    const double z = (cfg_.n == 3) ? cfg_.R * std::cos(theta) : 0.0;
    const double st = (cfg_.n == 3) ? std::sin(theta) : 1.0;
    const double ct = (cfg_.n == 3) ? std::cos(theta) : 0.0;
    const Complex ur =
        st * u_[ma].d_rho().eval(rho, z) + ct * u_[ma].d_z().eval(rho, z);
    const Complex tau =
        ur + Complex(0.0, cfg_.sign * ma * cfg_.omega) * u_[ma].eval(rho, z);
    return m >= 0 ? tau : std::conj(tau);
  }

  Eigen::VectorXcd exact_mode(int m, const Grid& g) const {
    Eigen::VectorXcd v(g.spatial_size());
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k)
        v[g.sidx(j, k)] = u_at(m, g.rho(j, k), g.n == 3 ? g.z(j, k) : 0.0);
    return v;
  }
  Eigen::VectorXcd tau_mode(int m, const Grid& g) const {
    Eigen::VectorXcd v(g.boundary_size());
    for (int k = 0; k < g.boundary_size(); ++k)
      v[k] = tau_at(m, g.n == 3 ? g.theta[k] : 0.0);
    return v;
  }

  Eigen::VectorXd exact_field(const Grid& g) const { return synth_volume(g, true); }
  Eigen::VectorXd f_field(const Grid& g) const { return synth_volume(g, false); }

  Eigen::VectorXd tau_field(const Grid& g) const {
    Eigen::VectorXd out(g.boundary_field_size());
    for (int k = 0; k < g.boundary_size(); ++k) {
      for (int l = 0; l < g.n_phi; ++l) {
        Complex acc = tau_at(0, g.n == 3 ? g.theta[k] : 0.0);
        for (int m = 1; m <= kmax_; ++m)
          acc += 2.0 * (tau_at(m, g.n == 3 ? g.theta[k] : 0.0) *
                        std::polar(1.0, m * g.phi[l]))
                           .real();
        out[g.bidx(k, l)] = acc.real();
      }
    }
    return out;
  }

  HelicalProblem problem(const GridResolution& res, int M) const {
    if (M < kmax_)
      throw std::invalid_argument("ManufacturedSolution: truncation below kmax");
    HelicalProblem p;
    p.config = cfg_;
    p.resolution = res;
    p.M = M;
    const Grid g = build_grid(cfg_, res);
    p.f = f_field(g);
    p.tau = tau_field(g);
    return p;
  }

 private:
  Eigen::VectorXd synth_volume(const Grid& g, bool exact) const {
    Eigen::VectorXd out(g.field_size());
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
        const double rho = g.rho(j, k), zz = g.n == 3 ? g.z(j, k) : 0.0;
        Complex base = exact ? u_at(0, rho, zz) : f_at(0, rho, zz);
        for (int l = 0; l < g.n_phi; ++l) {
          double acc = base.real();
          for (int m = 1; m <= kmax_; ++m) {
            const Complex cm = exact ? u_at(m, rho, zz) : f_at(m, rho, zz);
            acc += 2.0 * (cm * std::polar(1.0, m * g.phi[l])).real();
          }
          out[g.fidx(g.sidx(j, k), l)] = acc;
        }
      }
    return out;
  }

  HelicalConfig cfg_;
  int kmax_;
  std::vector<BivarPoly> u_, ft_, f_;
};

// sigma-weighted relative L2 error of a solved mode against exact samples,
// with the additive constant aligned for m = 0
inline double mode_l2_error(const ModeField& sol, const Eigen::VectorXcd& exact,
                            const Grid& g) {
  const Eigen::VectorXd s = sigma_weights(g);
  Eigen::VectorXcd diff = sol.values - exact;
  if (sol.m == 0) {
    const double stot = s.sum();
    diff.array() -= s.cast<Complex>().dot(diff) / stot;
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    num += s[i] * std::norm(diff[i]);
    den += s[i] * std::norm(exact[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// same for synthesized real fields
inline double field_l2_error(const Eigen::Ref<const Eigen::VectorXd>& u,
                             const Eigen::Ref<const Eigen::VectorXd>& exact,
                             const Grid& g) {
  const Eigen::VectorXd s = sigma_weights(g);
  const double shift = sigma_mean(u, g) - sigma_mean(exact, g);
  double num = 0.0, den = 0.0;
  for (int sp = 0; sp < g.spatial_size(); ++sp)
    for (int l = 0; l < g.n_phi; ++l) {
      const double d = u[g.fidx(sp, l)] - shift - exact[g.fidx(sp, l)];
      num += s[sp] * d * d;
      den += s[sp] * exact[g.fidx(sp, l)] * exact[g.fidx(sp, l)];
    }
  return std::sqrt(num / std::max(den, 1e-300));
}

// ---- constant-source preset -------------------------------------------------
//
// f = c with the compatible boundary value tau = c R / n (tau = 0 gives the
// canonical incompatible pair).  The exact solution is u = c rho^2/4 (n = 2)
// or c r^2/6 (n = 3) up to the gauge constant.
inline HelicalProblem constant_preset(const HelicalConfig& cfg,
                                      const GridResolution& res, int M, double c,
                                      bool compatible_tau = true) {
  HelicalProblem p;
  p.config = cfg;
  p.resolution = res;
  p.M = M;
  const Grid g = build_grid(cfg, res);
  p.f = Eigen::VectorXd::Constant(g.field_size(), c);
  const double tau = compatible_tau ? c * cfg.R / cfg.n : 0.0;
  p.tau = Eigen::VectorXd::Constant(g.boundary_field_size(), tau);
  return p;
}

inline Eigen::VectorXd constant_preset_exact(const HelicalConfig& cfg,
                                             const Grid& g, double c) {
  Eigen::VectorXd u(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
      const double v = (cfg.n == 2) ? c * g.r[j] * g.r[j] / 4.0
                                    : c * g.r[j] * g.r[j] / 6.0;
      for (int l = 0; l < g.n_phi; ++l) u[g.fidx(g.sidx(j, k), l)] = v;
    }
  return u;
}

// ---- random band-limited smooth fields --------------------------------------

// Axis-regular scalar field: sum over m <= max_m of rho^{min(m,2)}-weighted
// low-degree profiles times e^{i m phi}.  Smooth enough in the chart for all
// O(h^2) derivative and quadrature checks.
inline Eigen::VectorXd random_smooth_field(const Grid& g, unsigned seed,
                                           int max_m = 2, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double R = g.R;
  struct ModeCoef {
    Complex c0, c1, c2;
  };
  std::vector<ModeCoef> coef(max_m + 1);
  for (int m = 0; m <= max_m; ++m) {
    coef[m].c0 = Complex(unif(rng), m == 0 ? 0.0 : unif(rng));
    coef[m].c1 = Complex(unif(rng), m == 0 ? 0.0 : unif(rng));
    coef[m].c2 = Complex(unif(rng), m == 0 ? 0.0 : unif(rng));
  }
  Eigen::VectorXd out(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
      const double rho = g.rho(j, k);
      const double zz = (g.n == 3) ? g.z(j, k) : 0.0;
      const double r2 = (rho * rho + zz * zz) / (R * R);
      for (int l = 0; l < g.n_phi; ++l) {
        double acc = 0.0;
        for (int m = 0; m <= max_m; ++m) {
          const double reg = std::pow(rho / R, std::min(m, 2));
          const Complex prof =
              reg * (coef[m].c0 + coef[m].c1 * r2 + coef[m].c2 * (zz / R + r2 * r2));
          const Complex term = prof * std::polar(1.0, m * g.phi[l]);
          acc += (m == 0) ? term.real() : 2.0 * term.real();
        }
        out[g.fidx(g.sidx(j, k), l)] = amp * acc;
      }
    }
  return out;
}

inline Multiplier random_multiplier(const Grid& g, unsigned seed) {
  Multiplier m;
  m.a = random_smooth_field(g, seed, 2, 0.7);
  m.b_rho = random_smooth_field(g, seed + 101, 2, 0.5);
  m.b_phi = random_smooth_field(g, seed + 202, 2, 0.5);
  if (g.n == 3) m.b_z = random_smooth_field(g, seed + 303, 2, 0.5);
  return m;
}

// Documented test family for the energy identity suite: tensor products of
// degree <= 2 coordinate polynomials and trig polynomials in phi, modes up
// to max_m with geometric amplitude decay.  Axis-regular like the fields
// admitted by the mode solver.
inline Eigen::VectorXd smooth_low_degree_field(const Grid& g, unsigned seed,
                                               int max_m, double decay = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double R = g.R;
  std::vector<std::array<Complex, 3>> coef(max_m + 1);
  for (int m = 0; m <= max_m; ++m) {
    const double am = std::pow(decay, m);
    for (int c = 0; c < 3; ++c)
      coef[m][c] = am * Complex(unif(rng), m == 0 ? 0.0 : unif(rng));
  }
  Eigen::VectorXd out(g.field_size());
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
      const double rho = g.rho(j, k), zz = g.n == 3 ? g.z(j, k) : 0.0;
      const double r2 = (rho * rho + zz * zz) / (R * R);
      for (int l = 0; l < g.n_phi; ++l) {
        double acc = 0.0;
        for (int m = 0; m <= max_m; ++m) {
          const double reg = std::pow(rho / R, std::min(m, 2));
          const Complex prof =
              reg * (coef[m][0] + coef[m][1] * r2 + coef[m][2] * (zz / R));
          const Complex term = prof * std::polar(1.0, m * g.phi[l]);
          acc += (m == 0) ? term.real() : 2.0 * term.real();
        }
        out[g.fidx(g.sidx(j, k), l)] = acc;
      }
    }
  return out;
}

struct EnergyTestTriple {
  Eigen::VectorXd u;
  Multiplier mult;
};

// (u, a, b) triple for the integration-by-parts checks: a stays near the
// proof's a = -1 so the volume term does not self-cancel across the domain.
inline EnergyTestTriple energy_test_triple(const Grid& g, unsigned seed,
                                           int max_m = 2) {
  EnergyTestTriple t;
  t.u = smooth_low_degree_field(g, seed * 17 + 1, max_m, 0.4);
  t.mult.a = Eigen::VectorXd::Constant(g.field_size(), -1.0) +
             0.3 * smooth_low_degree_field(g, seed * 31 + 5, 1, 0.4);
  t.mult.b_rho = 0.3 * smooth_low_degree_field(g, seed * 37 + 11, 1, 0.4);
  t.mult.b_phi = 0.3 * smooth_low_degree_field(g, seed * 41 + 13, 1, 0.4);
  if (g.n == 3)
    t.mult.b_z = 0.3 * smooth_low_degree_field(g, seed * 43 + 17, 1, 0.4);
  return t;
}

// Random real field satisfying the homogeneous Sommerfeld condition
// analytically: per-mode radial profiles C_m with C'(R) + i sign m omega C(R)
// forced to zero through the highest coefficient.
inline Eigen::VectorXd random_bc_compatible_field(const Grid& g,
                                                  const HelicalConfig& cfg,
                                                  unsigned seed, int max_m = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double R = cfg.R;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.field_size());
  for (int m = 0; m <= max_m; ++m) {
    const int mp = std::min(m, 2);
    // radial profile C(r) = r^mp (c0 + c1 r + c2 r^2); for m = 0: even series
    Complex c0(unif(rng), m ? unif(rng) : 0.0), c1(unif(rng), m ? unif(rng) : 0.0);
    Complex c2;
    const Complex is(0.0, cfg.sign * m * cfg.omega);
    if (m == 0) {
      // C = c0 + c1 (r/R)^2 + c2 (r/R)^4 with C'(R) = 0
      c2 = -c1 * 0.5;
    } else {
      // bracket: C'(R) + is C(R) = 0 solved for c2
      const Complex g0 = mp * std::pow(R, mp - 1) + is * std::pow(R, mp);
      const Complex g1 = (mp + 1.0) * std::pow(R, mp) + is * std::pow(R, mp + 1);
      const Complex g2 = (mp + 2.0) * std::pow(R, mp + 1) + is * std::pow(R, mp + 2);
      c2 = -(g0 * c0 + g1 * c1) / g2;
    }
    const double s0 = unif(rng), s1 = unif(rng);
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k) {
        const double r = g.r[j];
        Complex C;
        if (m == 0) {
          const double q = (r / R) * (r / R);
          C = c0 + c1 * q + c2 * q * q;
        } else {
          C = std::pow(r, mp) * (c0 + c1 * r + c2 * r * r);
        }
        double ang = 1.0;
        if (g.n == 3) {
          const double st = std::sin(g.theta[k]), ct = std::cos(g.theta[k]);
          ang = (m == 0) ? 1.0 : std::pow(st, mp) * (s0 + s1 * ct);
        }
        for (int l = 0; l < g.n_phi; ++l) {
          const Complex term = C * ang * std::polar(1.0, m * g.phi[l]);
          out[g.fidx(g.sidx(j, k), l)] += (m == 0) ? term.real() : 2.0 * term.real();
        }
      }
  }
  return out;
}

// Random compatible problem: trig-polynomial source and boundary data with
// the m = 0 component of tau shifted so the quadrature compatibility holds
// exactly.
inline HelicalProblem random_problem(const HelicalConfig& cfg,
                                     const GridResolution& res, int M,
                                     unsigned seed) {
  HelicalProblem p;
  p.config = cfg;
  p.resolution = res;
  p.M = M;
  const Grid g = build_grid(cfg, res);
  p.f = random_smooth_field(g, seed, std::min(M, 2));
  const Eigen::VectorXd gfull = random_smooth_field(g, seed + 7, std::min(M, 2));
  p.tau.resize(g.boundary_field_size());
  for (int k = 0; k < g.boundary_size(); ++k)
    for (int l = 0; l < g.n_phi; ++l)
      p.tau[g.bidx(k, l)] = gfull[g.fidx(g.sidx(g.J, k), l)];
  const double resid = compatibility_residual(p, g);
  const double area =
      boundary_quadrature(detail::boundary_sigma_density(g), g);
  p.tau.array() += resid / area;
  return p;
}

// Chart components of a weight-one vector density obtained by pushing a
// smooth Cartesian vector field through the chart (the honest construction,
// so fluxes through the coordinate-singular faces vanish and the Stokes
// identity closes on the sphere alone).
inline std::vector<Eigen::VectorXd> random_vector_density(const Grid& g,
                                                          unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double R = g.R;
  // smooth Cartesian components: cubic polynomials in x/R scaled coords
  const int ncomp = (g.n == 2) ? 2 : 3;
  std::vector<std::array<double, 10>> W(ncomp);
  for (auto& w : W)
    for (auto& v : w) v = unif(rng);
  auto eval_cart = [&](int c, double x, double y, double zz) {
    const auto& w = W[c];
    return w[0] + w[1] * x + w[2] * y + w[3] * zz + w[4] * x * y + w[5] * x * x +
           w[6] * y * zz + w[7] * x * x * x + w[8] * x * y * y +
           w[9] * (zz != 0.0 ? zz * zz * x : y * y * y);
  };
  std::vector<Eigen::VectorXd> V(ncomp, Eigen::VectorXd(g.field_size()));
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k < (g.n == 2 ? 1 : g.K + 1); ++k)
      for (int l = 0; l < g.n_phi; ++l) {
        const int idx = g.fidx(g.sidx(j, k), l);
        const double ph = g.phi[l];
        if (g.n == 2) {
          const double x = g.r[j] * std::cos(ph) / R, y = g.r[j] * std::sin(ph) / R;
          const double wx = eval_cart(0, x, y, 0.0), wy = eval_cart(1, x, y, 0.0);
          // V^r = r (cos wx + sin wy); V^phi = -sin wx + cos wy
          V[0][idx] = g.r[j] * (std::cos(ph) * wx + std::sin(ph) * wy);
          V[1][idx] = -std::sin(ph) * wx + std::cos(ph) * wy;
        } else {
          const double st = std::sin(g.theta[k]), ct = std::cos(g.theta[k]);
          const double x = g.r[j] * st * std::cos(ph) / R,
                       y = g.r[j] * st * std::sin(ph) / R, zz = g.r[j] * ct / R;
          const double wx = eval_cart(0, x, y, zz), wy = eval_cart(1, x, y, zz),
                       wz = eval_cart(2, x, y, zz);
          const double wr = st * std::cos(ph) * wx + st * std::sin(ph) * wy + ct * wz;
          const double wt = ct * std::cos(ph) * wx + ct * std::sin(ph) * wy - st * wz;
          const double wp = -std::sin(ph) * wx + std::cos(ph) * wy;
          V[0][idx] = g.r[j] * g.r[j] * st * wr;
          V[1][idx] = g.r[j] * st * wt;
          V[2][idx] = g.r[j] * wp;
        }
      }
  return V;
}

}  // namespace helical

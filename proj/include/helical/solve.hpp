#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "helical/assemble.hpp"
#include "helical/grid.hpp"
#include "helical/modes.hpp"
#include "helical/quadrature.hpp"

namespace helical {

// Problem data: unweighted source f over the full grid (the solver forms
// f_tilde = sigma f), boundary data tau over the boundary parametrization,
// and the mode truncation M.
struct HelicalProblem {
  HelicalConfig config;
  GridResolution resolution;
  int M = 8;
  Eigen::VectorXd f;    // size grid.field_size()
  Eigen::VectorXd tau;  // size grid.boundary_field_size()
  double rtol = 1e-10;
  double compat_tol_factor = 10.0;
  bool allow_incompatible = false;
};

struct ModeSolveReport {
  int m = 0;
  bool ok = false;
  std::string error;
  double rel_residual = 0.0;         // || A u + lambda s - rhs || / || rhs ||
  double constraint_residual = 0.0;  // |s^T u| after gauge (m = 0 only)
  double cond_estimate = 0.0;        // of the factored (gauge-augmented) system
  int iterations = 0;                // iterative path only
  Complex gauge_multiplier{0.0, 0.0};
  double mean_removed = 0.0;         // sigma-mean subtracted for m = 0
};

struct SolveReport {
  int schema_version = 1;
  double compatibility_residual = 0.0;
  double compatibility_scale = 0.0;
  double compatibility_threshold = 0.0;
  bool compatible = true;
  bool tau_projected = false;
  double tau_shift = 0.0;
  double gauge_constant = 0.0;  // sigma-mean removed from the m = 0 mode
  double imag_residue = 0.0;    // synthesis conjugate-symmetry residue
  bool out_of_theory = false;   // omega R == 1: boundary tangent to cylinder
  std::vector<ModeSolveReport> modes;
};

class IncompatibleDataError : public std::runtime_error {
 public:
  IncompatibleDataError(const std::string& what, SolveReport rep)
      : std::runtime_error(what), report(std::move(rep)) {}
  SolveReport report;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double cond)
      : std::runtime_error(what), cond_estimate(cond) {}
  double cond_estimate;
};

enum class SolvePath { Direct, Iterative };

struct GaugeChoice {
  enum class Kind { SigmaMeanZero, PinNode };
  Kind kind = Kind::SigmaMeanZero;
  int node = 0;
};

namespace detail {

// mode analysis of a full real field: per spatial node, returns 2M+1 complex
// spatial vectors indexed by m + M
inline std::vector<Eigen::VectorXcd> analyze_layers(
    const Eigen::Ref<const Eigen::VectorXd>& samples, int count, int nphi, int M) {
  std::vector<Eigen::VectorXcd> layers(2 * M + 1, Eigen::VectorXcd(count));
  Eigen::VectorXd slice(nphi);
  for (int s = 0; s < count; ++s) {
    for (int l = 0; l < nphi; ++l) slice[l] = samples[s * nphi + l];
    const Eigen::VectorXcd modes = analyze_phi(slice, M);
    for (int i = 0; i <= 2 * M; ++i) layers[i][s] = modes[i];
  }
  return layers;
}

// sigma-weighted boundary measure density: R^{n-2} * sigma on the boundary
// parametrization (the Jacobian-included radial component of the identity's
// boundary current for data integrals)
inline Eigen::VectorXd boundary_sigma_density(const Grid& g) {
  Eigen::VectorXd d(g.boundary_field_size());
  if (g.n == 2) {
    d.setConstant(g.R);
  } else {
    for (int k = 0; k <= g.K; ++k) {
      const double v = g.R * g.R * std::sin(g.theta[k]);
      for (int l = 0; l < g.n_phi; ++l) d[g.bidx(k, l)] = v;
    }
  }
  return d;
}

// chart volume density factor: rho for n = 2, r^2 sin(theta) for n = 3
inline Eigen::VectorXd chart_volume_density(const Grid& g) {
  Eigen::VectorXd d(g.spatial_size());
  for (int j = 0; j <= g.J; ++j) {
    if (g.n == 2) {
      d[j] = g.r[j];
    } else {
      for (int k = 0; k <= g.K; ++k)
        d[g.sidx(j, k)] = g.r[j] * g.r[j] * std::sin(g.theta[k]);
    }
  }
  return d;
}

// power/inverse iteration condition estimate of a factored system
template <typename Solver>
inline double condition_estimate(const Eigen::SparseMatrix<Complex>& B,
                                 Solver& lu, int iters = 12) {
  const int N = static_cast<int>(B.rows());
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(N).normalized();
  double smax = 0.0;
  for (int i = 0; i < iters; ++i) {
    v = (B.adjoint() * (B * v)).eval();
    const double nrm = v.norm();
    if (nrm == 0.0) break;
    smax = std::sqrt(nrm);
    v /= nrm;
  }
  Eigen::VectorXcd w(N);
  {
    // fixed-seed fill keeps reports bit-identical across runs
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&state]() {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      return static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    };
    for (int i = 0; i < N; ++i) w[i] = Complex(next(), next());
    w.normalize();
  }
  double inv_smin = 0.0;
  for (int i = 0; i < iters; ++i) {
    w = lu.solve(lu.adjoint().solve(w).eval()).eval();
    const double nrm = w.norm();
    if (!std::isfinite(nrm) || nrm == 0.0) return std::numeric_limits<double>::infinity();
    inv_smin = std::sqrt(nrm);
    w /= nrm;
  }
  return smax * inv_smin;
}

}  // namespace detail

// int_B f_tilde - int_dB sigma tau, both by the second-order quadratures.
inline double compatibility_residual(const HelicalProblem& problem, const Grid& g) {
  if (problem.f.size() != g.field_size() ||
      problem.tau.size() != g.boundary_field_size())
    throw std::invalid_argument("compatibility_residual: data shape mismatch");
  const Eigen::VectorXd vol_density = detail::chart_volume_density(g);
  Eigen::VectorXd ftilde(g.field_size());
  for (int s = 0; s < g.spatial_size(); ++s)
    for (int l = 0; l < g.n_phi; ++l)
      ftilde[g.fidx(s, l)] = vol_density[s] * problem.f[g.fidx(s, l)];
  const Eigen::VectorXd bdry_density = detail::boundary_sigma_density(g);
  const Eigen::VectorXd stau = bdry_density.cwiseProduct(problem.tau);
  return volume_quadrature(ftilde, g) - boundary_quadrature(stau, g);
}

inline double compatibility_residual(const HelicalProblem& problem) {
  return compatibility_residual(problem,
                                build_grid(problem.config, problem.resolution));
}

inline double compatibility_scale(const HelicalProblem& problem, const Grid& g) {
  const Eigen::VectorXd vol_density = detail::chart_volume_density(g);
  Eigen::VectorXd ftilde(g.field_size());
  for (int s = 0; s < g.spatial_size(); ++s)
    for (int l = 0; l < g.n_phi; ++l)
      ftilde[g.fidx(s, l)] = vol_density[s] * std::abs(problem.f[g.fidx(s, l)]);
  const Eigen::VectorXd bdry_density = detail::boundary_sigma_density(g);
  const Eigen::VectorXd stau = bdry_density.cwiseProduct(problem.tau.cwiseAbs());
  return volume_quadrature(ftilde, g) + boundary_quadrature(stau, g);
}

// Solve one assembled mode system.  For m = 0 the system is singular with a
// constant null vector; it is solved in gauge-augmented (bordered) form
//
//      [ A   kappa c ] [u     ]   [rhs]
//      [ d^T   -gam  ] [lambda] = [ 0 ]
//
// The correction column c is the indicator of the Sommerfeld rows, so
// kappa lambda is precisely the constant shift of tau that restores discrete
// compatibility (the interior equations are satisfied exactly).  The
// constraint row d is the sigma-weight vector (sigma-mean-zero gauge) or a
// unit pin vector; either choice, and any corner gam, changes the solution
// by a constant only, which the final sigma-mean subtraction removes, so
// both solve paths land on the same canonical representative.
inline ModeField solve_mode_system(const DiscreteOperator& op,
                                   const Eigen::Ref<const Eigen::VectorXcd>& f_tilde_m,
                                   const Eigen::Ref<const Eigen::VectorXcd>& tau_m,
                                   double rtol, SolvePath path,
                                   ModeSolveReport* out_report = nullptr,
                                   GaugeChoice gauge = {}) {
  const Grid& g = op.grid;
  const int N = op.size();
  const Eigen::VectorXcd rhs = op.assemble_rhs(f_tilde_m, tau_m);
  ModeSolveReport rep;
  rep.m = op.m;

  Eigen::VectorXcd u(N);
  const bool singular_mode = (op.m == 0);

  if (!singular_mode) {
    if (path == SolvePath::Direct) {
      Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(op.A);
      if (lu.info() != Eigen::Success)
        throw SingularSystemError("solve_mode: sparse factorization failed for m=" +
                                      std::to_string(op.m),
                                  std::numeric_limits<double>::infinity());
      u = lu.solve(rhs);
      rep.cond_estimate = detail::condition_estimate(op.A, lu);
    } else {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<Complex>, Eigen::IncompleteLUT<Complex>> it;
      it.preconditioner().setDroptol(1e-7);
      it.preconditioner().setFillfactor(40);
      it.setTolerance(std::min(rtol, 1e-12));
      it.setMaxIterations(4000);
      it.compute(op.A);
      u = it.solve(rhs);
      rep.iterations = static_cast<int>(it.iterations());
      if (it.info() != Eigen::Success && it.error() > 1e-9)
        throw SingularSystemError(
            "solve_mode: iterative path failed for m=" + std::to_string(op.m),
            std::numeric_limits<double>::infinity());
    }
    rep.rel_residual = (op.A * u - rhs).norm() / std::max(rhs.norm(), 1e-300);
  } else {
    const Eigen::VectorXd s = sigma_weights(g);
    double rowscale = 0.0;
    for (int i = 0; i < N; ++i) rowscale = std::max(rowscale, std::abs(op.A.coeff(i, i)));
    // correction column: indicator of the boundary rows, scaled to their size
    Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
    const double kappa = 3.0 / (2.0 * g.hr);
    for (int i = 0; i < N; ++i)
      if (op.row_kinds[i] == DiscreteOperator::RowKind::Boundary) c[i] = kappa;
    const double gamma = (path == SolvePath::Iterative) ? rowscale : 0.0;

    Eigen::SparseMatrix<Complex> B(N + 1, N + 1);
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(op.A.nonZeros() + 3 * N + 1);
    for (int outer = 0; outer < op.A.outerSize(); ++outer)
      for (Eigen::SparseMatrix<Complex>::InnerIterator itA(op.A, outer); itA; ++itA)
        trip.emplace_back(itA.row(), itA.col(), itA.value());
    for (int i = 0; i < N; ++i)
      if (c[i] != 0.0) trip.emplace_back(i, N, Complex(c[i], 0.0));
    if (gauge.kind == GaugeChoice::Kind::SigmaMeanZero) {
      const double dscale = rowscale / s.maxCoeff();
      for (int i = 0; i < N; ++i)
        if (s[i] != 0.0) trip.emplace_back(N, i, Complex(dscale * s[i], 0.0));
    } else {
      trip.emplace_back(N, gauge.node, Complex(rowscale, 0.0));
    }
    if (gamma != 0.0) trip.emplace_back(N, N, Complex(-gamma, 0.0));
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();

    Eigen::VectorXcd brhs(N + 1);
    brhs.head(N) = rhs;
    brhs[N] = Complex(0.0, 0.0);
    Eigen::VectorXcd x(N + 1);
    if (path == SolvePath::Direct) {
      Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(B);
      if (lu.info() != Eigen::Success)
        throw SingularSystemError("solve_mode: m=0 bordered factorization failed",
                                  std::numeric_limits<double>::infinity());
      x = lu.solve(brhs);
      rep.cond_estimate = detail::condition_estimate(B, lu);
    } else {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<Complex>, Eigen::IncompleteLUT<Complex>> it;
      it.preconditioner().setDroptol(1e-7);
      it.preconditioner().setFillfactor(40);
      it.setTolerance(std::min(rtol, 1e-12));
      it.setMaxIterations(4000);
      it.compute(B);
      x = it.solve(brhs);
      rep.iterations = static_cast<int>(it.iterations());
      if (it.info() != Eigen::Success && it.error() > 1e-9)
        throw SingularSystemError("solve_mode: m=0 iterative path failed",
                                  std::numeric_limits<double>::infinity());
    }
    u = x.head(N);
    rep.gauge_multiplier = x[N] * kappa;  // the discrete tau shift
    rep.rel_residual = (op.A * u + x[N] * c.cast<Complex>() - rhs).norm() /
                       std::max(rhs.norm(), 1e-300);
    // canonical representative: subtract the sigma-weighted mean
    const double stot = s.sum();
    const Complex mean = s.cast<Complex>().dot(u) / stot;
    u.array() -= mean;
    rep.mean_removed = mean.real();
    rep.constraint_residual = std::abs(s.cast<Complex>().dot(u)) / stot;
  }

  if (!std::isfinite(u.norm()))
    throw SingularSystemError("solve_mode: non-finite solution for m=" +
                                  std::to_string(op.m),
                              rep.cond_estimate);
  if (rep.rel_residual > std::max(50.0 * rtol, 1e-9))
    throw SingularSystemError(
        "solve_mode: linear residual " + std::to_string(rep.rel_residual) +
            " exceeds tolerance for m=" + std::to_string(op.m),
        rep.cond_estimate);

  rep.ok = true;
  if (out_report) *out_report = rep;
  return ModeField{op.m, std::move(u)};
}

namespace detail {

struct ModeData {
  std::vector<Eigen::VectorXcd> f_modes;    // spatial layers, index m + M
  std::vector<Eigen::VectorXcd> tau_modes;  // boundary layers, index m + M
};

inline ModeData analyze_problem(const HelicalProblem& p, const Grid& g) {
  if (g.n_phi < 2 * p.M + 1)
    throw std::invalid_argument("solve: nphi must be >= 2M+1 for mode analysis");
  if (p.f.size() != g.field_size() || p.tau.size() != g.boundary_field_size())
    throw std::invalid_argument("solve: data shape mismatch with grid");
  ModeData d;
  d.f_modes = analyze_layers(p.f, g.spatial_size(), g.n_phi, p.M);
  d.tau_modes = analyze_layers(p.tau, g.boundary_size(), g.n_phi, p.M);
  return d;
}

inline Eigen::VectorXcd sigma_weight_mode_source(const Eigen::VectorXcd& f_mode,
                                                 const Grid& g) {
  Eigen::VectorXcd ft(g.spatial_size());
  for (int j = 0; j <= g.J; ++j) {
    if (g.n == 2) {
      ft[j] = g.r[j] * f_mode[j];
    } else {
      for (int k = 0; k <= g.K; ++k)
        ft[g.sidx(j, k)] = g.rho(j, k) * f_mode[g.sidx(j, k)];
    }
  }
  return ft;
}

inline void check_compatibility(const HelicalProblem& p, const Grid& g,
                                SolveReport& rep,
                                std::vector<Eigen::VectorXcd>& tau_modes, int M) {
  rep.compatibility_residual = compatibility_residual(p, g);
  rep.compatibility_scale = compatibility_scale(p, g);
  const double h = g.h();
  rep.compatibility_threshold =
      p.compat_tol_factor * h * h * rep.compatibility_scale +
      1e-13 * (1.0 + rep.compatibility_scale);
  rep.compatible = std::abs(rep.compatibility_residual) <= rep.compatibility_threshold;
  if (rep.compatible) return;
  if (!p.allow_incompatible)
    throw IncompatibleDataError(
        "IncompatibleData: |int_B f_tilde - int_dB sigma tau| = " +
            std::to_string(std::abs(rep.compatibility_residual)) +
            " exceeds threshold " + std::to_string(rep.compatibility_threshold) +
            " (use the override to project tau)",
        rep);
  // documented side effect of the override: shift the m = 0 component of tau
  // so the data become compatible
  const double sigma_area = boundary_quadrature(boundary_sigma_density(g), g);
  const double shift = rep.compatibility_residual / sigma_area;
  tau_modes[M].array() += shift;
  rep.tau_projected = true;
  rep.tau_shift = shift;
}

}  // namespace detail

// Per-mode solve from problem data (analysis + assembly + linear solve).
inline ModeField solve_mode(int m, const HelicalProblem& problem, const Grid& g,
                            ModeSolveReport* out_report = nullptr,
                            SolvePath path = SolvePath::Direct,
                            GaugeChoice gauge = {}) {
  if (std::abs(m) > problem.M)
    throw std::invalid_argument("solve_mode: |m| exceeds truncation M");
  problem.config.validate();
  detail::ModeData data = detail::analyze_problem(problem, g);
  if (m == 0) {
    SolveReport rep;
    detail::check_compatibility(problem, g, rep, data.tau_modes, problem.M);
  }
  const DiscreteOperator op = assemble_mode_system(m, g, problem.config);
  const Eigen::VectorXcd ft =
      detail::sigma_weight_mode_source(data.f_modes[m + problem.M], g);
  return solve_mode_system(op, ft, data.tau_modes[m + problem.M], problem.rtol,
                           path, out_report, gauge);
}

struct FullSolution {
  Eigen::VectorXd u;                  // synthesized real field, grid x phi
  std::vector<ModeField> modes;       // index m + M
  SolveReport report;
  bool ok = true;                     // false when any per-mode solve failed
};

// Analyze data into modes, solve every |m| <= M, synthesize.  Per-mode
// failures are recorded in the report and leave a zero placeholder mode;
// the partial result is returned with ok = false.
inline FullSolution solve_full(const HelicalProblem& problem,
                               SolvePath path = SolvePath::Direct) {
  problem.config.validate();
  const Grid g = build_grid(problem.config, problem.resolution);
  FullSolution sol;
  sol.report.out_of_theory = problem.config.boundary_tangent_to_light_cylinder();
  detail::ModeData data = detail::analyze_problem(problem, g);
  detail::check_compatibility(problem, g, sol.report, data.tau_modes, problem.M);

  const int M = problem.M;
  sol.modes.resize(2 * M + 1);
  for (int m = -M; m <= M; ++m) {
    ModeSolveReport mrep;
    const DiscreteOperator op = assemble_mode_system(m, g, problem.config);
    const Eigen::VectorXcd ft =
        detail::sigma_weight_mode_source(data.f_modes[m + M], g);
    try {
      sol.modes[m + M] = solve_mode_system(op, ft, data.tau_modes[m + M],
                                           problem.rtol, path, &mrep);
    } catch (const SingularSystemError& e) {
      mrep.ok = false;
      mrep.error = e.what();
      mrep.cond_estimate = e.cond_estimate;
      sol.modes[m + M] = ModeField{m, Eigen::VectorXcd::Zero(g.spatial_size())};
      sol.ok = false;
    }
    sol.report.modes.push_back(mrep);
  }

  // synthesis with conjugate-symmetry bookkeeping
  sol.u.resize(g.field_size());
  double max_imag = 0.0, scale = 0.0;
  for (int s = 0; s < g.spatial_size(); ++s) {
    for (int l = 0; l < g.n_phi; ++l) {
      Complex acc(0.0, 0.0);
      for (int m = -M; m <= M; ++m)
        acc += sol.modes[m + M].values[s] * std::polar(1.0, m * g.phi[l]);
      sol.u[g.fidx(s, l)] = acc.real();
      max_imag = std::max(max_imag, std::abs(acc.imag()));
      scale = std::max(scale, std::abs(acc));
    }
  }
  sol.report.imag_residue = scale > 0.0 ? max_imag / scale : 0.0;
  for (const auto& mrep : sol.report.modes)
    if (mrep.m == 0) sol.report.gauge_constant = mrep.mean_removed;
  return sol;
}

}  // namespace helical

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "helical/grid.hpp"
#include "helical/operators.hpp"
#include "helical/quadrature.hpp"

namespace helical {

// Sparse per-mode linear system: interior rows reproduce
// mode_operator_apply, boundary rows reproduce mode_boundary_residual with
// tau moved to the right side, and the coordinate-singular nodes carry
// regularity rows:
//   n = 2 axis, m = 0:   half-cell flux balance (conservative form of even
//                        reflection across rho = 0)
//   n = 2 axis, m != 0:  u = 0
//   n = 3 poles, m = 0:  one-sided u_theta = 0
//   n = 3 poles, m != 0: u = 0
//   n = 3 origin, m = 0: single-value consistency plus a finite-volume flux
//                        balance over r <= h/2
//   n = 3 origin, m != 0: u = 0
// For m = 0 the homogeneous system annihilates constants exactly.
struct DiscreteOperator {
  enum class RowKind { Interior, Boundary, Axis, Pole, Origin, Consistency };

  int m = 0;
  Grid grid;
  Eigen::SparseMatrix<Complex> A;
  std::vector<RowKind> row_kinds;

  int size() const { return static_cast<int>(A.rows()); }

  // equilibration factor applied to the m = 0 flux-balance regularity rows
  // (axis half-cell for n = 2, origin ball for n = 3); restores the natural
  // interior row magnitude so the singular spectrum is not polluted by an
  // artificially weak row.  Solutions are unchanged.
  double axis_row_scale() const {
    return grid.n == 2 ? 2.0 / (grid.hr * grid.hr)
                       : 4.0 / (grid.hr * grid.htheta);
  }

  // maps (f_tilde, tau) to the right-hand side; f_tilde = sigma * f is the
  // cylindrical weight-one source density sampled on the spatial grid
  Eigen::VectorXcd assemble_rhs(const Eigen::Ref<const Eigen::VectorXcd>& f_tilde,
                                const Eigen::Ref<const Eigen::VectorXcd>& tau) const {
    const Grid& g = grid;
    if (f_tilde.size() != g.spatial_size())
      throw std::invalid_argument("assemble_rhs: f_tilde shape mismatch");
    if (tau.size() != g.boundary_size())
      throw std::invalid_argument("assemble_rhs: tau length mismatch");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(g.spatial_size());
    if (g.n == 2) {
      for (int j = 1; j < g.J; ++j) rhs[j] = f_tilde[j];
      rhs[g.J] = tau[0];
      if (m == 0)
        rhs[0] = axis_row_scale() * (g.hr / 8.0) * (3.0 * f_tilde[0] + f_tilde[1]);
      return rhs;
    }
    for (int j = 1; j < g.J; ++j)
      for (int k = 1; k < g.K; ++k)
        rhs[g.sidx(j, k)] = g.r[j] * f_tilde[g.sidx(j, k)];
    for (int k = 0; k <= g.K; ++k) {
      const bool corner = (k == 0 || k == g.K);
      if (m == 0 || !corner) rhs[g.sidx(g.J, k)] = tau[k];
    }
    if (m == 0) {
      const Eigen::VectorXd wt = detail::trapezoid_weights(g.K + 1, g.htheta);
      Complex src(0.0, 0.0);
      for (int k = 0; k <= g.K; ++k)
        src += wt[k] * g.hr * g.hr *
               (f_tilde[g.sidx(0, k)] / 12.0 + f_tilde[g.sidx(1, k)] / 24.0);
      rhs[g.sidx(0, 0)] = axis_row_scale() * src;
    }
    return rhs;
  }
};

inline DiscreteOperator assemble_mode_system(int m, const Grid& g,
                                             const HelicalConfig& cfg) {
  if (cfg.n != g.n)
    throw std::invalid_argument("assemble_mode_system: dimension mismatch");
  DiscreteOperator op;
  op.m = m;
  op.grid = g;
  const int N = g.spatial_size();
  op.row_kinds.assign(N, DiscreteOperator::RowKind::Interior);
  std::vector<Eigen::Triplet<Complex>> trip;
  const double m2 = static_cast<double>(m) * m;
  const double w2 = cfg.omega * cfg.omega;
  const Complex rot(0.0, cfg.sign * m * cfg.omega);
  const double c2r = 1.0 / (2.0 * g.hr);
  using RK = DiscreteOperator::RowKind;

  if (g.n == 2) {
    const double ih2 = 1.0 / (g.hr * g.hr);
    // axis
    if (m == 0) {
      const double s = op.axis_row_scale();
      trip.emplace_back(0, 0, Complex(-0.5 * s, 0.0));
      trip.emplace_back(0, 1, Complex(0.5 * s, 0.0));
    } else {
      trip.emplace_back(0, 0, Complex(1.0, 0.0));
    }
    op.row_kinds[0] = RK::Axis;
    // interior
    for (int j = 1; j < g.J; ++j) {
      const double rp = g.r[j] + 0.5 * g.hr, rm = g.r[j] - 0.5 * g.hr;
      double diag = -(rp + rm) * ih2;
      if (m != 0) diag -= m2 * (1.0 - w2 * g.r[j] * g.r[j]) / g.r[j];
      trip.emplace_back(j, j - 1, Complex(rm * ih2, 0.0));
      trip.emplace_back(j, j, Complex(diag, 0.0));
      trip.emplace_back(j, j + 1, Complex(rp * ih2, 0.0));
    }
    // Sommerfeld
    trip.emplace_back(g.J, g.J, Complex(3.0 * c2r, 0.0) + rot);
    trip.emplace_back(g.J, g.J - 1, Complex(-4.0 * c2r, 0.0));
    trip.emplace_back(g.J, g.J - 2, Complex(c2r, 0.0));
    op.row_kinds[g.J] = RK::Boundary;
  } else {
    const double ihr2 = 1.0 / (g.hr * g.hr), iht2 = 1.0 / (g.htheta * g.htheta);
    const double c2t = 1.0 / (2.0 * g.htheta);
    // origin
    if (m == 0) {
      const int row0 = g.sidx(0, 0);
      const Eigen::VectorXd wt = detail::trapezoid_weights(g.K + 1, g.htheta);
      const double rs = op.axis_row_scale();
      Complex diag(0.0, 0.0);
      for (int k = 0; k <= g.K; ++k) {
        const double c = rs * wt[k] * 0.25 * g.hr * std::sin(g.theta[k]);
        if (c != 0.0) trip.emplace_back(row0, g.sidx(1, k), Complex(c, 0.0));
        diag -= c;
      }
      trip.emplace_back(row0, row0, diag);
      op.row_kinds[row0] = RK::Origin;
      for (int k = 1; k <= g.K; ++k) {
        trip.emplace_back(g.sidx(0, k), g.sidx(0, k), Complex(1.0, 0.0));
        trip.emplace_back(g.sidx(0, k), row0, Complex(-1.0, 0.0));
        op.row_kinds[g.sidx(0, k)] = RK::Consistency;
      }
    } else {
      for (int k = 0; k <= g.K; ++k) {
        trip.emplace_back(g.sidx(0, k), g.sidx(0, k), Complex(1.0, 0.0));
        op.row_kinds[g.sidx(0, k)] = RK::Axis;
      }
    }
    // poles at j = 1..J-1 (the boundary ring owns j = J)
    for (int j = 1; j < g.J; ++j)
      for (int k : {0, g.K}) {
        const int row = g.sidx(j, k);
        if (m == 0) {
          const int dir = (k == 0) ? +1 : -1;
          trip.emplace_back(row, row, Complex(-3.0 * dir * c2t, 0.0));
          trip.emplace_back(row, g.sidx(j, k + dir), Complex(4.0 * dir * c2t, 0.0));
          trip.emplace_back(row, g.sidx(j, k + 2 * dir), Complex(-dir * c2t, 0.0));
          op.row_kinds[row] = RK::Pole;
        } else {
          trip.emplace_back(row, row, Complex(1.0, 0.0));
          op.row_kinds[row] = RK::Axis;
        }
      }
    // interior
    for (int j = 1; j < g.J; ++j) {
      const double rp = g.r[j] + 0.5 * g.hr, rm = g.r[j] - 0.5 * g.hr;
      for (int k = 1; k < g.K; ++k) {
        const double st = std::sin(g.theta[k]);
        const double stp = std::sin(g.theta[k] + 0.5 * g.htheta);
        const double stm = std::sin(g.theta[k] - 0.5 * g.htheta);
        const int row = g.sidx(j, k);
        const double ar_p = st * rp * rp * ihr2, ar_m = st * rm * rm * ihr2;
        const double at_p = stp * iht2, at_m = stm * iht2;
        double diag = -(ar_p + ar_m + at_p + at_m);
        if (m != 0) {
          const double rho = g.r[j] * st;
          diag -= m2 * (1.0 - w2 * rho * rho) / st;
        }
        trip.emplace_back(row, g.sidx(j - 1, k), Complex(ar_m, 0.0));
        trip.emplace_back(row, g.sidx(j + 1, k), Complex(ar_p, 0.0));
        trip.emplace_back(row, g.sidx(j, k - 1), Complex(at_m, 0.0));
        trip.emplace_back(row, g.sidx(j, k + 1), Complex(at_p, 0.0));
        trip.emplace_back(row, row, Complex(diag, 0.0));
      }
    }
    // boundary ring; for m != 0 the pole corners carry the axis condition
    for (int k = 0; k <= g.K; ++k) {
      const int row = g.sidx(g.J, k);
      const bool corner = (k == 0 || k == g.K);
      if (m != 0 && corner) {
        trip.emplace_back(row, row, Complex(1.0, 0.0));
        op.row_kinds[row] = RK::Axis;
        continue;
      }
      trip.emplace_back(row, row, Complex(3.0 * c2r, 0.0) + rot);
      trip.emplace_back(row, g.sidx(g.J - 1, k), Complex(-4.0 * c2r, 0.0));
      trip.emplace_back(row, g.sidx(g.J - 2, k), Complex(c2r, 0.0));
      op.row_kinds[row] = RK::Boundary;
    }
  }

  op.A.resize(N, N);
  op.A.setFromTriplets(trip.begin(), trip.end());
  op.A.makeCompressed();
  return op;
}

// plain-text sparse dump: one "row col re im" line per stored entry
inline void write_sparse_triplets(std::ostream& os,
                                  const Eigen::SparseMatrix<Complex>& A) {
  os << "# rows " << A.rows() << " cols " << A.cols() << " nnz " << A.nonZeros()
     << "\n# row col re im\n";
  char buf[128];
  for (int outer = 0; outer < A.outerSize(); ++outer)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(A, outer); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n",
                    static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value().real(), it.value().imag());
      os << buf;
    }
}

}  // namespace helical

#pragma once
#include <algorithm>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "helical/assemble.hpp"

namespace helical {

struct NullSpaceOptions {
  int k = 3;                 // number of smallest singular values requested
  int max_iterations = 200;
  double ritz_tol = 1e-10;   // relative stagnation tolerance on the values
  int dense_threshold = 700; // below this, use a dense SVD outright
  unsigned seed = 12345;
};

struct NullSpaceReport {
  Eigen::VectorXd singular_values;   // ascending, size k
  Eigen::MatrixXcd singular_vectors; // right vectors, one column per value
  double sigma_max = 0.0;
  bool converged = true;
  int iterations = 0;
  bool used_dense = false;

  // |<v_i, 1>| / (||v_i|| ||1||): closeness of vector i to the constant
  double cosine_with_constant(int i) const {
    const int N = static_cast<int>(singular_vectors.rows());
    const Complex ip = singular_vectors.col(i).sum();
    return std::abs(ip) / (singular_vectors.col(i).norm() * std::sqrt(double(N)));
  }
};

// Smallest singular values and right singular vectors of a sparse complex
// matrix.  Dense SVD at small sizes; otherwise block inverse iteration on
// A^H A through two sparse LU factorizations of a tiny-shifted copy (the
// shift only stabilizes pivoting on exactly singular systems - the reported
// values are computed on the unshifted matrix).  Non-convergence is
// reported, with best estimates retained.
inline NullSpaceReport null_space_probe(const Eigen::SparseMatrix<Complex>& A,
                                        const NullSpaceOptions& opt = {}) {
  const int N = static_cast<int>(A.rows());
  if (A.rows() != A.cols()) throw std::invalid_argument("null_space_probe: square only");
  if (opt.k < 1 || opt.k >= N) throw std::invalid_argument("null_space_probe: bad k");
  NullSpaceReport rep;

  if (N <= opt.dense_threshold) {
    const Eigen::MatrixXcd dense(A);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    rep.sigma_max = sv[0];
    rep.singular_values.resize(opt.k);
    rep.singular_vectors.resize(N, opt.k);
    for (int i = 0; i < opt.k; ++i) {
      rep.singular_values[i] = sv[N - 1 - i];
      rep.singular_vectors.col(i) = svd.matrixV().col(N - 1 - i);
    }
    rep.used_dense = true;
    return rep;
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto rand_vec = [&](int rows) {
    Eigen::VectorXcd v(rows);
    for (int i = 0; i < rows; ++i) v[i] = Complex(unif(rng), unif(rng));
    return v;
  };

  // sigma_max by power iteration on A^H A
  {
    Eigen::VectorXcd v = rand_vec(N).normalized();
    for (int it = 0; it < 40; ++it) {
      v = (A.adjoint() * (A * v)).eval();
      const double nrm = v.norm();
      if (nrm == 0.0) break;
      rep.sigma_max = std::sqrt(nrm);
      v /= nrm;
    }
  }

  // The shift keeps the factorization's null-direction amplification at
  // ~1/shift, so the round-off injected by each solve stays far below the
  // deflated signal (contamination ~ eps (sigma_2/shift)^2).  It biases the
  // computed vectors by at most shift/gap; the values are refreshed on the
  // unshifted matrix.
  const double shift = 1e-8 * std::max(rep.sigma_max, 1e-300);
  Eigen::SparseMatrix<Complex> Ashift = A;
  {
    Eigen::SparseMatrix<Complex> eye(N, N);
    eye.setIdentity();
    Ashift += shift * eye;
  }
  Eigen::SparseMatrix<Complex> AshiftH = Ashift.adjoint();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(Ashift);
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> luH(AshiftH);
  if (lu.info() != Eigen::Success || luH.info() != Eigen::Success)
    throw std::runtime_error("null_space_probe: factorization failed");

  // sequential inverse iteration on A^H A with deflation: a converged
  // near-null direction is projected out of every later iterate, or the
  // remaining columns would drown in its 1/sigma^2 amplification
  const int k = opt.k;
  Eigen::MatrixXcd V(N, k);
  Eigen::VectorXd values(k);
  rep.converged = true;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXcd x = rand_vec(N);
    for (int p = 0; p < c; ++p) x -= V.col(p) * V.col(p).dot(x);
    x.normalize();
    double sigma = (A * x).norm();
    bool ok = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
      ++rep.iterations;
      x = lu.solve(luH.solve(x).eval()).eval();
      for (int p = 0; p < c; ++p) x -= V.col(p) * V.col(p).dot(x);
      const double nrm = x.norm();
      if (!std::isfinite(nrm) || nrm == 0.0) break;
      x /= nrm;
      const double next = (A * x).norm();
      const double change = std::abs(next - sigma);
      sigma = next;
      if (change <= opt.ritz_tol * std::max(rep.sigma_max, 1e-300) &&
          change <= 1e-6 * std::max(sigma, 1e-300)) {
        ok = true;
        break;
      }
    }
    rep.converged = rep.converged && ok;
    V.col(c) = x;
    values[c] = sigma;
  }
  // ascending order
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return values[a] < values[b]; });
  rep.singular_values.resize(k);
  rep.singular_vectors.resize(N, k);
  for (int i = 0; i < k; ++i) {
    rep.singular_values[i] = values[idx[i]];
    rep.singular_vectors.col(i) = V.col(idx[i]);
  }
  return rep;
}

inline NullSpaceReport null_space_probe(const DiscreteOperator& op,
                                        const NullSpaceOptions& opt = {}) {
  return null_space_probe(op.A, opt);
}

// test helper: replace one row by a Dirichlet pin, as in the gauge
// experiments (the pinned homogeneous system has no near-null vector)
inline Eigen::SparseMatrix<Complex> pin_node(const Eigen::SparseMatrix<Complex>& A,
                                             int node, double value = 1.0) {
  const int N = static_cast<int>(A.rows());
  std::vector<Eigen::Triplet<Complex>> trip;
  for (int outer = 0; outer < A.outerSize(); ++outer)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(A, outer); it; ++it)
      if (it.row() != node) trip.emplace_back(it.row(), it.col(), it.value());
  trip.emplace_back(node, node, Complex(value, 0.0));
  Eigen::SparseMatrix<Complex> out(N, N);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace helical

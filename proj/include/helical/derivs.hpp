#pragma once
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "helical/grid.hpp"

namespace helical {
namespace fd {

// Second-order difference along one strided axis: central in the interior,
// one-sided three-point at the ends (the same stencil the solver's boundary
// rows use), central wrap-around when periodic.
template <typename Scalar>
inline void diff_axis(const Scalar* in, Scalar* out, int count, int stride,
                      double h, bool periodic) {
  const double c2 = 1.0 / (2.0 * h);
  auto at = [&](int i) { return in[i * stride]; };
  if (periodic) {
    for (int i = 0; i < count; ++i) {
      const int ip = (i + 1) % count, im = (i - 1 + count) % count;
      out[i * stride] = (at(ip) - at(im)) * c2;
    }
    return;
  }
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * c2;
  for (int i = 1; i < count - 1; ++i) out[i * stride] = (at(i + 1) - at(i - 1)) * c2;
  out[(count - 1) * stride] =
      (3.0 * at(count - 1) - 4.0 * at(count - 2) + at(count - 3)) * c2;
}

}  // namespace fd

// ---- derivatives of full fields (layout: spatial index x phi) ----

inline Eigen::VectorXd d_dr_field(const Eigen::Ref<const Eigen::VectorXd>& f,
                                  const Grid& g) {
  Eigen::VectorXd out(f.size());
  if (g.n == 2) {
    for (int l = 0; l < g.n_phi; ++l)
      fd::diff_axis(f.data() + l, out.data() + l, g.J + 1, g.n_phi, g.hr, false);
  } else {
    const int rstride = (g.K + 1) * g.n_phi;
    for (int k = 0; k <= g.K; ++k)
      for (int l = 0; l < g.n_phi; ++l) {
        const int base = k * g.n_phi + l;
        fd::diff_axis(f.data() + base, out.data() + base, g.J + 1, rstride, g.hr, false);
      }
  }
  return out;
}

inline Eigen::VectorXd d_dtheta_field(const Eigen::Ref<const Eigen::VectorXd>& f,
                                      const Grid& g) {
  Eigen::VectorXd out(f.size());
  for (int j = 0; j <= g.J; ++j)
    for (int l = 0; l < g.n_phi; ++l) {
      const int base = j * (g.K + 1) * g.n_phi + l;
      fd::diff_axis(f.data() + base, out.data() + base, g.K + 1, g.n_phi, g.htheta, false);
    }
  return out;
}

// The phi derivative is the mode-multiplication derivative (d_phi -> i m on
// Fourier coefficients), matching the solver, which never differences in phi.
// Exact on band-limited fields; the unpaired Nyquist mode is dropped.  The
// composition synthesize . (i m) . analyze is one real circulant matrix, so
// the whole field is one matrix product.
inline Eigen::MatrixXd spectral_derivative_matrix(int nphi) {
  const int M = (nphi - 1) / 2;
  Eigen::MatrixXd D(nphi, nphi);
  for (int l = 0; l < nphi; ++l)
    for (int lp = 0; lp < nphi; ++lp) {
      double v = 0.0;
      for (int m = 1; m <= M; ++m)
        v -= 2.0 * m * std::sin(m * 2.0 * M_PI * (l - lp) / nphi);
      D(l, lp) = v / nphi;
    }
  return D;
}

inline Eigen::VectorXd d_dphi_field(const Eigen::Ref<const Eigen::VectorXd>& f,
                                    const Grid& g) {
  const Eigen::MatrixXd D = spectral_derivative_matrix(g.n_phi);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> in(f.data(), g.spatial_size(), g.n_phi);
  Eigen::VectorXd out(f.size());
  Eigen::Map<RowMat>(out.data(), g.spatial_size(), g.n_phi) = in * D.transpose();
  return out;
}

// ---- derivatives of per-mode spatial fields ----

template <typename Vec>
inline Vec d_dr_mode(const Vec& v, const Grid& g) {
  Vec out(v.size());
  if (g.n == 2) {
    fd::diff_axis(v.data(), out.data(), g.J + 1, 1, g.hr, false);
  } else {
    for (int k = 0; k <= g.K; ++k)
      fd::diff_axis(v.data() + k, out.data() + k, g.J + 1, g.K + 1, g.hr, false);
  }
  return out;
}

template <typename Vec>
inline Vec d_dtheta_mode(const Vec& v, const Grid& g) {
  Vec out(v.size());
  for (int j = 0; j <= g.J; ++j)
    fd::diff_axis(v.data() + j * (g.K + 1), out.data() + j * (g.K + 1), g.K + 1, 1,
                  g.htheta, false);
  return out;
}

// ---- removable-singularity policy ----
//
// Grid-sampled integrands built from h^{ab} contractions are 0/0 at the
// coordinate-singular nodes (the n=2 axis r=0, the n=3 poles theta in
// {0, pi} and the origin r=0).  The limits are finite for admissible fields;
// the nodes are filled by quadratic extrapolation along the resolving
// coordinate, which keeps the composite quadrature at O(h^2).

inline void fill_singular_volume_nodes(Eigen::VectorXd& I, const Grid& g) {
  auto extrap = [](double a, double b, double c) { return 3.0 * a - 3.0 * b + c; };
  if (g.n == 2) {
    for (int l = 0; l < g.n_phi; ++l)
      I[g.fidx(0, l)] = extrap(I[g.fidx(1, l)], I[g.fidx(2, l)], I[g.fidx(3, l)]);
    return;
  }
  for (int j = 1; j <= g.J; ++j)
    for (int l = 0; l < g.n_phi; ++l) {
      I[g.fidx(g.sidx(j, 0), l)] = extrap(I[g.fidx(g.sidx(j, 1), l)],
                                          I[g.fidx(g.sidx(j, 2), l)],
                                          I[g.fidx(g.sidx(j, 3), l)]);
      I[g.fidx(g.sidx(j, g.K), l)] = extrap(I[g.fidx(g.sidx(j, g.K - 1), l)],
                                            I[g.fidx(g.sidx(j, g.K - 2), l)],
                                            I[g.fidx(g.sidx(j, g.K - 3), l)]);
    }
  for (int k = 0; k <= g.K; ++k)
    for (int l = 0; l < g.n_phi; ++l)
      I[g.fidx(g.sidx(0, k), l)] = extrap(I[g.fidx(g.sidx(1, k), l)],
                                          I[g.fidx(g.sidx(2, k), l)],
                                          I[g.fidx(g.sidx(3, k), l)]);
}

// boundary integrands on the n=3 sphere, layout (K+1) x nphi
inline void fill_singular_boundary_nodes(Eigen::VectorXd& I, const Grid& g) {
  if (g.n == 2) return;
  auto extrap = [](double a, double b, double c) { return 3.0 * a - 3.0 * b + c; };
  for (int l = 0; l < g.n_phi; ++l) {
    I[g.bidx(0, l)] = extrap(I[g.bidx(1, l)], I[g.bidx(2, l)], I[g.bidx(3, l)]);
    I[g.bidx(g.K, l)] = extrap(I[g.bidx(g.K - 1, l)], I[g.bidx(g.K - 2, l)],
                               I[g.bidx(g.K - 3, l)]);
  }
}

}  // namespace helical

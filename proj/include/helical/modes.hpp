#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "helical/config.hpp"

namespace helical {

using Complex = std::complex<double>;

// Fourier convention, used everywhere:
//   u(phi) = sum_{m=-M..M} u_m e^{+i m phi}
// on the uniform grid phi_l = 2 pi l / N_phi.  Coefficients carry the full
// field (no 1/2pi split).  For real input u_{-m} = conj(u_m).

// Discrete analysis at a fixed spatial point.  Returns 2M+1 coefficients,
// index i <-> mode m = i - M.  Requires N_phi >= 2M+1.
inline Eigen::VectorXcd analyze_phi(const Eigen::Ref<const Eigen::VectorXd>& samples,
                                    int M) {
  const int nphi = static_cast<int>(samples.size());
  if (M < 0) throw std::invalid_argument("analyze_phi: M < 0");
  if (nphi < 2 * M + 1)
    throw std::invalid_argument("analyze_phi: N_phi too small for requested M");
  Eigen::VectorXcd modes(2 * M + 1);
  const double dphi = 2.0 * M_PI / nphi;
  for (int m = -M; m <= M; ++m) {
    Complex acc(0.0, 0.0);
    for (int l = 0; l < nphi; ++l)
      acc += samples[l] * std::polar(1.0, -m * l * dphi);
    modes[m + M] = acc / static_cast<double>(nphi);
  }
  return modes;
}

// Inverse transform onto an N_phi grid.  The input must be conjugate
// symmetric; an imaginary residue above `imag_tol` (relative to the field
// scale) is flagged as an error.
inline Eigen::VectorXd synthesize_phi(const Eigen::Ref<const Eigen::VectorXcd>& modes,
                                      int nphi, double imag_tol = 1e-12) {
  if (modes.size() % 2 == 0)
    throw std::invalid_argument("synthesize_phi: expected 2M+1 coefficients");
  const int M = (static_cast<int>(modes.size()) - 1) / 2;
  if (nphi < 2 * M + 1)
    throw std::invalid_argument("synthesize_phi: N_phi too small for band limit");
  Eigen::VectorXd out(nphi);
  const double dphi = 2.0 * M_PI / nphi;
  double max_imag = 0.0, scale = 0.0;
  for (int l = 0; l < nphi; ++l) {
    Complex acc(0.0, 0.0);
    for (int m = -M; m <= M; ++m)
      acc += modes[m + M] * std::polar(1.0, m * l * dphi);
    out[l] = acc.real();
    max_imag = std::max(max_imag, std::abs(acc.imag()));
    scale = std::max(scale, std::abs(acc.real()));
  }
  if (max_imag > imag_tol * std::max(scale, 1e-300) && max_imag > 1e-300)
    throw std::invalid_argument(
        "synthesize_phi: input is not conjugate symmetric (imaginary residue "
        "above tolerance)");
  return out;
}

// Relative imaginary residue of a synthesis, without throwing.  Used by the
// solver to report the conjugate-symmetry quality of a mode set.
inline double synthesis_imag_residue(const Eigen::Ref<const Eigen::VectorXcd>& modes,
                                     int nphi) {
  const int M = (static_cast<int>(modes.size()) - 1) / 2;
  const double dphi = 2.0 * M_PI / nphi;
  double max_imag = 0.0, scale = 0.0;
  for (int l = 0; l < nphi; ++l) {
    Complex acc(0.0, 0.0);
    for (int m = -M; m <= M; ++m)
      acc += modes[m + M] * std::polar(1.0, m * l * dphi);
    max_imag = std::max(max_imag, std::abs(acc.imag()));
    scale = std::max(scale, std::abs(acc));
  }
  return scale > 0.0 ? max_imag / scale : 0.0;
}

}  // namespace helical

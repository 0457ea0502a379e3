#pragma once

#include <cmath>
#include <complex>

#include "gtdyn/signatures.hpp"
#include "gtdyn/symfunc.hpp"
#include "gtdyn/voiculescu.hpp"

namespace gtdyn {

// ============================================================================
// Brute-force Haar-integral oracle at N = 2: the transition kernel as the
// double contour integral
//
//   Q(lam, mu) = dim(mu)/dim(lam) * (1/2!) *
//     int_{T^2} Phi(z1) Phi(z2) a_lam(z) conj(a_mu(z)) dz1 dz2 / (2 pi i z)^2
//
// with a_lam(z) = det[z_i^{lam_j + 2 - j}] (the alternant; the |V|^2 factor
// is absorbed so coincident grid points contribute 0 without special-casing).
// This route never touches the coefficient sequence or any determinant of
// phi's, so it independently pins down the exponent convention of the
// determinantal formula.
// ============================================================================

inline double haar_transition_entry_n2(const OmegaPoint& omega, const Signature& lam,
                                       const Signature& mu, int grid = 192) {
  if (lam.size() != 2 || mu.size() != 2)
    throw std::invalid_argument("haar_transition_entry_n2: N = 2 only");
  validate_omega(omega);
  using C = std::complex<double>;
  const double twopi = 2.0 * std::acos(-1.0);
  const Int al[2] = {lam[0] + 1, lam[1]};  // lam_j + N - j, 1-based j
  const Int am[2] = {mu[0] + 1, mu[1]};

  std::vector<C> z(grid), phi(grid);
  std::vector<C> zl0(grid), zl1(grid), zm0(grid), zm1(grid);
  for (int j = 0; j < grid; ++j) {
    double th = twopi * j / grid;
    z[j] = C(std::cos(th), std::sin(th));
    phi[j] = phi_eval(omega, z[j]);
    zl0[j] = std::pow(z[j], static_cast<double>(al[0]));
    zl1[j] = std::pow(z[j], static_cast<double>(al[1]));
    zm0[j] = std::pow(z[j], static_cast<double>(am[0]));
    zm1[j] = std::pow(z[j], static_cast<double>(am[1]));
  }

  C acc(0.0, 0.0);
  for (int j = 0; j < grid; ++j)
    for (int k = 0; k < grid; ++k) {
      C a_lam = zl0[j] * zl1[k] - zl1[j] * zl0[k];
      C a_mu = zm0[j] * zm1[k] - zm1[j] * zm0[k];
      acc += phi[j] * phi[k] * a_lam * std::conj(a_mu);
    }
  double integral = acc.real() / (2.0 * grid * grid);
  return integral * dim_u_d(mu) / dim_u_d(lam);
}

}  // namespace gtdyn

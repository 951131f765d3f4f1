#pragma once

// Mode-expansion conventions for the free field, collected in one place.
//
// Fourier transform:  f~(p) = (2 pi)^{-s/2} int d^s x e^{-i p.x} f(x).
// Weyl operators:     W(f) = exp(i (a*(xi_f) + a(xi_f))),
//                     xi_f = 2^{-1/2} (omega^{-1/2} f~_R + i omega^{1/2} f~_I).
// Smeared fields:     phi(g)    = a*(u) + a(u),  u = (2 omega)^{-1/2} g~,
//                     d0 phi(g) = a*(v) + a(v),  v = -i (omega/2)^{1/2} g~,
// so that W(f) = exp(i (phi(Re f) - d0 phi(Im f))) and
// [phi(g), d0 phi(h)] = -i int g h.
// Point fields:       d^nu phi(0) = a*(K_nu) + a(K_nu),
//                     K_nu(p) = (2 pi)^{-s/2} (2 omega)^{-1/2}
//                               (-i omega)^{nu_0} prod_k (-i p_k)^{nu_k}.
// With this sign of the time derivative the coefficient functional of
// phi_{n,nu} carries (-i)^n (-1)^{sum nu_0} / (n! nu!) in front of the nested
// commutator expectation.

#include "scalim/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace scalim::conventions {

inline double fourier_norm(int s) {
  return std::pow(2.0 * std::numbers::pi, -0.5 * s);
}

/// Factor multiplying g~ in the one-particle vector of phi(g) (time bit 0)
/// or d0 phi(g) (time bit 1).
inline cplx smeared_field_factor(int time_bit, double omega) {
  if (time_bit == 0)
    return 1.0 / std::sqrt(2.0 * omega);
  return cplx(0.0, -std::sqrt(0.5 * omega));
}

/// (-i)^n.
inline cplx sigma_phase(int n) {
  static const cplx table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return table[((n % 4) + 4) % 4];
}

} // namespace scalim::conventions

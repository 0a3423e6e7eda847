#pragma once

#include <cmath>
#include <stdexcept>

#include "cavity/constants.hpp"

// Closed-form polariton branches of a single matter resonance coupled to a
// photon mode, and the ground-state shift of the single-mode model. Used as
// the comparison baseline for the full Lifshitz calculation.

namespace cavity {

/// Matter resonance omega0 with collective coupling g inside a cavity whose
/// fundamental mode is omega_L = pi c / L.
struct CouplingSpec {
  double omega0 = 0.0;   // rad/s, > 0
  double g = 0.0;        // rad/s, >= 0
  double omega_L = 0.0;  // rad/s, > 0

  static CouplingSpec for_gap(double omega0, double g, double gap_length) {
    return {omega0, g, omega_fundamental(gap_length)};
  }

  void validate() const {
    if (!(omega0 > 0.0)) throw std::invalid_argument("coupling: omega0 must be > 0");
    if (g < 0.0) throw std::invalid_argument("coupling: g must be >= 0");
    if (!(omega_L > 0.0)) throw std::invalid_argument("coupling: omega_L must be > 0");
  }
};

struct PolaritonPair {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
};

/// Two positive roots of (w^2 - wm^2)(w^2 - w0^2) = 4 g^2 w^2 for a photon
/// mode wm. The lower root is recovered from the product identity
/// w+ w- = w0 wm, which stays accurate when g -> 0 (no cancellation).
inline PolaritonPair polariton_pair(double omega_mode, double omega0, double g) {
  const double a = 0.5 * (omega_mode * omega_mode + omega0 * omega0 + 4.0 * g * g);
  const double b = omega0 * omega0 * omega_mode * omega_mode;  // product of squares
  const double disc = std::sqrt(std::max(a * a - b, 0.0));
  const double wp = std::sqrt(a + disc);
  return {wp, omega0 * omega_mode / wp};
}

/// Bulk polaritons of the infinite medium at wave vector k (photon branch ck).
inline PolaritonPair bulk_polaritons(double k, const CouplingSpec& spec) {
  spec.validate();
  if (!(k > 0.0)) throw std::invalid_argument("bulk_polaritons: k must be > 0");
  return polariton_pair(c_light * k, spec.omega0, spec.g);
}

/// Cavity polaritons of band n at in-plane momentum q: the photon branch is
/// the cavity mode omega_{q,n} = c sqrt(q^2 + (pi n / L)^2).
inline PolaritonPair cavity_polaritons(double q, int n, double gap_length,
                                       const CouplingSpec& spec) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("cavity_polaritons: n must be >= 1");
  if (q < 0.0) throw std::invalid_argument("cavity_polaritons: q must be >= 0");
  const double kz_n = pi * n / gap_length;
  return polariton_pair(c_light * std::hypot(q, kz_n), spec.omega0, spec.g);
}

/// Ground-state energy shift of the single-mode model,
/// hbar (w+ + w- - w0 - wL)/2. Uses the identity
/// (w+ + w-)^2 = (w0 + wL)^2 + 4 g^2, so the small-g cancellation is exact:
///   shift = 2 hbar g^2 / (sqrt((w0+wL)^2 + 4 g^2) + w0 + wL)  >= 0.
inline double single_mode_shift(const CouplingSpec& spec) {
  spec.validate();
  const double s = spec.omega0 + spec.omega_L;
  return 2.0 * hbar * spec.g * spec.g / (std::hypot(s, 2.0 * spec.g) + s);
}

/// Shift relative to the uncoupled zero-point energy hbar (w0 + wL)/2;
/// equals sqrt(1 + 4 g^2/(w0+wL)^2) - 1.
inline double single_mode_relative(const CouplingSpec& spec) {
  spec.validate();
  const double s = spec.omega0 + spec.omega_L;
  const double x = 4.0 * spec.g * spec.g / (s * s);
  return x / (std::sqrt(1.0 + x) + 1.0);
}

/// Polaritonic gap sqrt(w0^2 + 4 g^2) - w0: the frequency window with no
/// propagating bulk polariton.
inline double polariton_gap(const CouplingSpec& spec) {
  spec.validate();
  const double x = 4.0 * spec.g * spec.g;
  return x / (std::hypot(spec.omega0, 2.0 * spec.g) + spec.omega0);
}

}  // namespace cavity

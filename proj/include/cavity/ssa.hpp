#pragma once

#include <cmath>
#include <stdexcept>

#include "cavity/constants.hpp"
#include "cavity/quadrature.hpp"

// Static screening approximation: freeze the gap permittivity at its static
// value, so the ideal-mirror Casimir energy is simply divided by
// sqrt(eps(0)). Serves both as a fast path and as an oracle for the full
// quadrature engine.

namespace cavity {

struct SsaInput {
  double gap_length = 0.0;  // m, > 0
  double omega0 = 0.0;      // rad/s, > 0
  double g = 0.0;           // rad/s, >= 0
  double eps_inf = 1.0;

  void validate() const {
    if (!(gap_length > 0.0)) throw std::invalid_argument("ssa: gap_length must be > 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("ssa: omega0 must be > 0");
    if (g < 0.0) throw std::invalid_argument("ssa: g must be >= 0");
    if (eps_inf < 1.0) throw std::invalid_argument("ssa: eps_inf must be >= 1");
  }
};

/// Statically screened ideal-mirror energy per unit area at T = 0:
///   -(hbar c pi^2 / 720 L^3) / sqrt(eps_inf + 4 g^2/omega0^2).
inline double ssa_energy(const SsaInput& in) {
  in.validate();
  const double l3 = in.gap_length * in.gap_length * in.gap_length;
  const double eps0 = in.eps_inf + 4.0 * in.g * in.g / (in.omega0 * in.omega0);
  return -hbar * c_light * pi * pi / (720.0 * l3 * std::sqrt(eps0));
}

/// Relative energy shift 1 - sqrt(eps_inf)/sqrt(eps_inf + 4 g^2/omega0^2).
/// The g = 0 reference carries the same eps_inf background, so the shift
/// vanishes at g = 0 for any background and reduces to
/// 1 - 1/sqrt(1 + 4 g^2/omega0^2) when eps_inf = 1. Increasing in g,
/// bounded by 1.
inline double ssa_relative_shift(double omega0, double g, double eps_inf = 1.0) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("ssa: omega0 must be > 0");
  if (g < 0.0) throw std::invalid_argument("ssa: g must be >= 0");
  if (eps_inf < 1.0) throw std::invalid_argument("ssa: eps_inf must be >= 1");
  const double eps0 = eps_inf + 4.0 * g * g / (omega0 * omega0);
  return 1.0 - std::sqrt(eps_inf / eps0);
}

/// Numerical check of the constants behind the closed form. The x-integral
/// int_0^inf x^2 ln(1-e^-x) dx equals -pi^4/45; the momentum integral
/// int_1^inf p^-3 dp equals 1/2; assembled with the two polarizations and
/// the 1/(16 pi^2) prefactor they give the -pi^2/720 Casimir constant.
struct SsaIntegralCheck {
  double x_integral = 0.0;
  double p_integral = 0.0;
  double x_deviation = 0.0;  // from -pi^4/45
  double p_deviation = 0.0;  // from 1/2
  double prefactor = 0.0;    // 2 * p_integral * x_integral / (16 pi^2)
  double prefactor_deviation = 0.0;  // from -pi^2/720
};

inline SsaIntegralCheck ssa_integral_constants(double rel_tol = 1e-10) {
  SsaIntegralCheck out;
  auto x_integrand = [](double x) {
    if (x <= 0.0) return 0.0;
    return x * x * std::log(-std::expm1(-x));
  };
  const QuadResult xr = integrate_to_infinity(x_integrand, 0.0, 3.0, rel_tol, 0.0, 8000);
  if (!xr.converged) throw std::runtime_error("ssa_integral_constants: x-integral failed");
  auto p_integrand = [](double p) { return 1.0 / (p * p * p); };
  const QuadResult pr = integrate_to_infinity(p_integrand, 1.0, 1.0, rel_tol, 0.0, 8000);
  if (!pr.converged) throw std::runtime_error("ssa_integral_constants: p-integral failed");

  out.x_integral = xr.value;
  out.p_integral = pr.value;
  out.x_deviation = xr.value + pi * pi * pi * pi / 45.0;
  out.p_deviation = pr.value - 0.5;
  out.prefactor = 2.0 * pr.value * xr.value / (16.0 * pi * pi);
  out.prefactor_deviation = out.prefactor + pi * pi / 720.0;
  return out;
}

}  // namespace cavity

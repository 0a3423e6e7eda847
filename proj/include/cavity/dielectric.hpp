#pragma once

#include <complex>
#include <stdexcept>
#include <variant>

#include "cavity/constants.hpp"

// Permittivity models evaluated on the positive imaginary frequency axis
// (where passive response functions are real, positive and monotonically
// decreasing) and at complex frequency in the upper half-plane (for
// transmission spectra and real-frequency diagnostics).

namespace cavity {

/// Single-resonance Lorentz medium,
///   eps(omega) = eps_inf + 4 g^2 / (omega0^2 - omega^2 - i omega gamma).
/// g is the collective coupling of the embedded oscillators; eps_inf >= 1
/// absorbs a non-resonant background (solvent, higher resonances).
struct LorentzMedium {
  double omega0 = 0.0;   // resonance, rad/s, > 0
  double gamma = 0.0;    // damping, rad/s, >= 0
  double g = 0.0;        // collective coupling, rad/s, >= 0
  double eps_inf = 1.0;  // background permittivity, >= 1

  /// Static limit eps(0) = eps_inf + 4 g^2/omega0^2, independent of gamma.
  double static_eps() const { return eps_inf + 4.0 * g * g / (omega0 * omega0); }

  bool operator==(const LorentzMedium&) const = default;
};

/// Drude metal, eps(omega) = 1 - omega_p^2 / (omega^2 + i omega gamma).
/// On the imaginary axis eps(i xi) = 1 + omega_p^2/(xi^2 + xi gamma), which
/// diverges at xi -> 0; the xi = 0 point is handled by dedicated reflection
/// limits, never by this formula.
struct DrudeMetal {
  double omega_p = 0.0;  // plasma frequency, rad/s, > 0
  double gamma = 0.0;    // relaxation rate, rad/s, > 0

  bool operator==(const DrudeMetal&) const = default;
};

struct ConstantDielectric {
  double eps = 1.0;  // >= 1

  bool operator==(const ConstantDielectric&) const = default;
};

/// Sentinel for ideal mirrors with unit-magnitude reflection at every
/// frequency. It has no permittivity of its own; the fresnel layer
/// special-cases it.
struct PerfectConductor {
  bool operator==(const PerfectConductor&) const = default;
};

using DielectricModel =
    std::variant<LorentzMedium, DrudeMetal, ConstantDielectric, PerfectConductor>;

inline bool is_pec(const DielectricModel& m) {
  return std::holds_alternative<PerfectConductor>(m);
}

inline void validate(const DielectricModel& m) {
  if (const auto* lor = std::get_if<LorentzMedium>(&m)) {
    if (!(lor->omega0 > 0.0)) throw std::invalid_argument("lorentz: omega0 must be > 0");
    if (lor->gamma < 0.0) throw std::invalid_argument("lorentz: gamma must be >= 0");
    if (lor->g < 0.0) throw std::invalid_argument("lorentz: g must be >= 0");
    if (lor->eps_inf < 1.0) throw std::invalid_argument("lorentz: eps_inf must be >= 1");
  } else if (const auto* dru = std::get_if<DrudeMetal>(&m)) {
    if (!(dru->omega_p > 0.0)) throw std::invalid_argument("drude: omega_p must be > 0");
    if (!(dru->gamma > 0.0)) throw std::invalid_argument("drude: gamma must be > 0");
  } else if (const auto* con = std::get_if<ConstantDielectric>(&m)) {
    if (con->eps < 1.0) throw std::invalid_argument("constant: eps must be >= 1");
  }
}

/// eps(i xi) on the positive imaginary axis. Real, finite, >= 1 for passive
/// media; strictly decreasing in xi for the Lorentz model.
inline double eps_imag(const DielectricModel& m, double xi) {
  if (xi < 0.0) throw std::domain_error("eps_imag: xi must be >= 0");
  if (const auto* lor = std::get_if<LorentzMedium>(&m))
    return lor->eps_inf +
           4.0 * lor->g * lor->g / (lor->omega0 * lor->omega0 + xi * xi + xi * lor->gamma);
  if (const auto* dru = std::get_if<DrudeMetal>(&m)) {
    if (xi == 0.0)
      throw std::domain_error(
          "eps_imag: Drude permittivity diverges at xi = 0; use the xi = 0 "
          "reflection limits");
    return 1.0 + dru->omega_p * dru->omega_p / (xi * xi + xi * dru->gamma);
  }
  if (const auto* con = std::get_if<ConstantDielectric>(&m)) return con->eps;
  throw std::domain_error("eps_imag: perfect conductor has no permittivity");
}

/// eps(omega) at complex frequency with Im(omega) >= 0 (causal region).
inline std::complex<double> eps_real(const DielectricModel& m, std::complex<double> omega) {
  if (omega.imag() < 0.0)
    throw std::domain_error("eps_real: omega must lie in the closed upper half-plane");
  using namespace std::complex_literals;
  if (const auto* lor = std::get_if<LorentzMedium>(&m))
    return lor->eps_inf + 4.0 * lor->g * lor->g /
                              (lor->omega0 * lor->omega0 - omega * omega -
                               1i * omega * lor->gamma);
  if (const auto* dru = std::get_if<DrudeMetal>(&m))
    return 1.0 - dru->omega_p * dru->omega_p / (omega * omega + 1i * omega * dru->gamma);
  if (const auto* con = std::get_if<ConstantDielectric>(&m))
    return std::complex<double>(con->eps, 0.0);
  throw std::domain_error("eps_real: perfect conductor has no permittivity");
}

/// Static (xi = 0) permittivity for the dedicated zero-frequency reflection
/// rules. Drude metals are flagged divergent instead of evaluated.
struct StaticEps {
  double value = 1.0;
  bool divergent = false;
};

inline StaticEps static_eps_zero(const DielectricModel& m) {
  if (const auto* lor = std::get_if<LorentzMedium>(&m)) return {lor->static_eps(), false};
  if (std::holds_alternative<DrudeMetal>(m)) return {0.0, true};
  if (const auto* con = std::get_if<ConstantDielectric>(&m)) return {con->eps, false};
  throw std::domain_error("static_eps_zero: perfect conductor handled separately");
}

}  // namespace cavity

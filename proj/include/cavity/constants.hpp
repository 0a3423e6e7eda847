#pragma once

#include <numbers>

// Physical constants (SI, 2019 redefinition) and unit helpers.
//
// Everything inside the library is SI: angular frequencies in rad/s, lengths
// in m, energies in J, temperatures in K. Conversions from eV/nm happen at
// the interface boundary only.

namespace cavity {

inline constexpr double pi = std::numbers::pi;

inline constexpr double planck_h = 6.62607015e-34;        // J s, exact
inline constexpr double hbar = planck_h / (2.0 * pi);     // J s
inline constexpr double c_light = 299792458.0;            // m/s, exact
inline constexpr double k_boltzmann = 1.380649e-23;       // J/K, exact
inline constexpr double electron_volt = 1.602176634e-19;  // J, exact

inline constexpr double zeta3 = 1.2020569031595942854;  // Riemann zeta(3)

constexpr double ev_to_rad_s(double ev) { return ev * electron_volt / hbar; }
constexpr double rad_s_to_ev(double omega) { return omega * hbar / electron_volt; }

constexpr double nanometers(double nm) { return nm * 1e-9; }
constexpr double micrometers(double um) { return um * 1e-6; }

/// Fundamental mode frequency pi*c/L of a planar cavity of gap L.
constexpr double omega_fundamental(double gap_length) {
  return pi * c_light / gap_length;
}

}  // namespace cavity

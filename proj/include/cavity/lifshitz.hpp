#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavity/constants.hpp"
#include "cavity/dielectric.hpp"
#include "cavity/fresnel.hpp"
#include "cavity/quadrature.hpp"

// Casimir-Lifshitz energies of a planar cavity: zero-temperature energy per
// unit area
//
//   U/S = (hbar / 4 pi^2) int_0^inf q dq int_0^inf dxi
//             sum_pol ln(1 - r^- r^+ exp(-2 k_z L)),
//
// its finite-temperature Matsubara counterpart, integrand diagnostics on
// both frequency axes, coupled-vs-uncoupled differences and per-molecule
// normalization.
//
// The wave-vector integral is mapped to u = 2 k_z L, where the integrand
// decays like exp(-u); the frequency integral runs on a rational map of the
// semi-infinite axis. Evaluation order is deterministic, so results are
// reproducible bit for bit.

namespace cavity {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  int max_subdivisions = 4000;
  double matsubara_rel_cutoff = 1e-10;
  int matsubara_max_terms = 400000;
  bool record_integrand = false;

  void validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("quadrature: rel_tol must be > 0");
    if (max_subdivisions < 1)
      throw std::invalid_argument("quadrature: max_subdivisions must be >= 1");
    if (!(matsubara_rel_cutoff > 0.0))
      throw std::invalid_argument("quadrature: matsubara_rel_cutoff must be > 0");
  }
};

/// Gap of length L filled with a (possibly resonant) medium, bounded by two
/// mirror stacks, at temperature T.
struct CavityConfig {
  double gap_length = 0.0;  // m, > 0
  DielectricModel gap = ConstantDielectric{1.0};
  MirrorStack top = MirrorStack::pec();
  MirrorStack bottom = MirrorStack::pec();
  double temperature = 0.0;  // K, >= 0

  void validate() const {
    if (!(gap_length > 0.0)) throw std::invalid_argument("cavity: L must be > 0");
    if (temperature < 0.0) throw std::invalid_argument("cavity: T must be >= 0");
    if (is_pec(gap) || std::holds_alternative<DrudeMetal>(gap))
      throw std::invalid_argument("cavity: gap medium must have a finite static permittivity");
    cavity::validate(gap);
    top.validate();
    bottom.validate();
  }

  /// Same cavity with the gap coupling switched off (g = 0); the background
  /// permittivity stays.
  CavityConfig decoupled() const {
    CavityConfig off = *this;
    if (auto* lor = std::get_if<LorentzMedium>(&off.gap)) lor->g = 0.0;
    return off;
  }
};

struct XiSample {
  double xi = 0.0;   // rad/s
  double u_xi = 0.0;  // J s / m^2, energy per area per unit xi
};

struct EnergyResult {
  double u_per_area = 0.0;      // J/m^2 (free energy per area when T > 0)
  double rel_tol_achieved = 0.0;
  int matsubara_terms_used = 0;  // 0 for T = 0 integrals
  std::vector<XiSample> xi_integrand_samples;  // filled when record_integrand
};

/// Quadrature or Matsubara truncation did not reach the requested tolerance;
/// carries the partial value and the tolerance actually achieved.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial, double achieved_rel)
      : std::runtime_error(what + " (partial value " + std::to_string(partial) +
                           ", achieved rel. tol. " + std::to_string(achieved_rel) + ")"),
        partial_(partial),
        achieved_(achieved_rel) {}

  double partial_value() const { return partial_; }
  double achieved_rel_tol() const { return achieved_; }

 private:
  double partial_;
  double achieved_;
};

namespace detail {

// ln(1 - rr e^{-u}) for rr in [-1, 1], u >= 0, accurate both in the tail and
// near the u -> 0, rr -> 1 log singularity.
inline double log_one_minus_product(double rr, double u) {
  const double e = std::exp(-u);
  const double x = rr * e;
  if (x > 0.5) return std::log(-std::expm1(-u) + (1.0 - rr) * e);
  return std::log1p(-x);
}

// Everything beyond u = u0 + inner_tail is below double precision: the
// integrand is bounded by u e^{-u}.
inline constexpr double inner_tail = 60.0;

struct InnerIntegral {
  double value = 0.0;      // int q dq sum_pol ln(...), units 1/m^2
  double abs_error = 0.0;
};

// Wave-vector integral at fixed imaginary frequency, in u = 2 k_z L
// coordinates; the shifted variable v = u - u0 keeps q = sqrt(v (v + 2 u0))/2L
// free of cancellation. abs_tol is the caller's significance floor: far in
// the frequency tail the integral drops below the subnormal range, where a
// relative target is meaningless.
inline InnerIntegral inner_q_integral(const CavityConfig& cfg, double xi,
                                      double rel_tol, double abs_tol,
                                      int max_subdivisions) {
  const double length = cfg.gap_length;
  const double gap_eps = eps_imag(cfg.gap, xi);
  const double u0 = (xi > 0.0) ? 2.0 * length * std::sqrt(gap_eps) * xi / c_light : 0.0;

  const PreparedStack top(cfg.top, gap_eps, xi);
  const bool symmetric = (cfg.top == cfg.bottom);
  const std::optional<PreparedStack> bottom =
      symmetric ? std::nullopt : std::optional<PreparedStack>(PreparedStack(cfg.bottom, gap_eps, xi));

  const double norm = 1.0 / (4.0 * length * length);
  auto integrand = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double u = u0 + v;
    const double q = std::sqrt(v * (v + 2.0 * u0)) / (2.0 * length);
    const double rp_top = top.reflect(q, Polarization::p);
    const double rs_top = top.reflect(q, Polarization::s);
    const double rp_bot = symmetric ? rp_top : bottom->reflect(q, Polarization::p);
    const double rs_bot = symmetric ? rs_top : bottom->reflect(q, Polarization::s);
    const double sum = log_one_minus_product(rp_top * rp_bot, u) +
                       log_one_minus_product(rs_top * rs_bot, u);
    return u * sum * norm;
  };

  const QuadResult r = integrate_adaptive(integrand, 0.0, inner_tail, rel_tol, abs_tol,
                                          max_subdivisions);
  if (!r.converged)
    throw ConvergenceError("inner wave-vector integral did not converge",
                           r.value, std::abs(r.value) > 0.0 ? r.abs_error / std::abs(r.value)
                                                            : r.abs_error);
  return {r.value, r.abs_error};
}

// Decay scale of the frequency integrand: the larger of the gap resonance
// and the fundamental cavity frequency.
inline double xi_reference(const CavityConfig& cfg) {
  double ref = omega_fundamental(cfg.gap_length);
  if (const auto* lor = std::get_if<LorentzMedium>(&cfg.gap))
    ref = std::max(ref, lor->omega0);
  return ref;
}

}  // namespace detail

/// Zero-temperature Lifshitz energy per unit area, negative for identical
/// passive mirrors. The outer frequency integral is driven to half the
/// requested tolerance, the inner wave-vector integrals to a tenth, so the
/// reported tolerance stays within spec.rel_tol.
inline EnergyResult casimir_energy_T0(const CavityConfig& cfg,
                                      const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  if (cfg.temperature != 0.0)
    throw std::invalid_argument("casimir_energy_T0: requires T = 0");

  const double inner_tol = 0.1 * spec.rel_tol;
  const double prefactor = hbar / (4.0 * pi * pi);

  EnergyResult result;
  double inner_scale = 0.0;  // largest inner value met so far, sets the floor
  auto outer = [&](double xi) {
    const detail::InnerIntegral inner = detail::inner_q_integral(
        cfg, xi, inner_tol, 1e-2 * inner_tol * inner_scale, spec.max_subdivisions);
    inner_scale = std::max(inner_scale, std::abs(inner.value));
    if (spec.record_integrand)
      result.xi_integrand_samples.push_back({xi, prefactor * inner.value});
    return inner.value;
  };

  const QuadResult q = integrate_to_infinity(outer, 0.0, detail::xi_reference(cfg),
                                             0.5 * spec.rel_tol, 0.0,
                                             spec.max_subdivisions);
  const double achieved =
      (std::abs(q.value) > 0.0 ? q.abs_error / std::abs(q.value) : q.abs_error) + inner_tol;
  if (!q.converged)
    throw ConvergenceError("frequency integral did not converge", prefactor * q.value,
                           achieved);

  std::sort(result.xi_integrand_samples.begin(), result.xi_integrand_samples.end(),
            [](const XiSample& a, const XiSample& b) { return a.xi < b.xi; });
  result.u_per_area = prefactor * q.value;
  result.rel_tol_achieved = achieved;
  return result;
}

/// Frequency-resolved integrand U_xi at fixed imaginary frequency (J s/m^2):
/// the energy density per unit xi, smooth and monotonically decaying.
inline double integrand_xi(const CavityConfig& cfg, double xi,
                           const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  if (xi < 0.0) throw std::domain_error("integrand_xi: xi must be >= 0");
  const detail::InnerIntegral inner =
      detail::inner_q_integral(cfg, xi, 0.1 * spec.rel_tol, 0.0, spec.max_subdivisions);
  return hbar / (4.0 * pi * pi) * inner.value;
}

/// Real-frequency diagnostic: the analytic continuation of the integrand to
/// omega + i gamma/2, i.e. slightly above the real axis with a uniform
/// broadening gamma > 0 (the q-integral diverges for strictly lossless
/// media). Exhibits sign changes at the cavity resonances and keeps one sign
/// inside the polaritonic gap.
inline double integrand_omega(const CavityConfig& cfg, double omega, double gamma,
                              const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  if (!(omega > 0.0)) throw std::domain_error("integrand_omega: omega must be > 0");
  if (!(gamma > 0.0))
    throw std::domain_error("integrand_omega: lossless media refused; gamma must be > 0");

  const std::complex<double> omega_c(omega, 0.5 * gamma);
  const std::complex<double> gap_eps = eps_real(cfg.gap, omega_c);
  const double length = cfg.gap_length;
  const bool symmetric = (cfg.top == cfg.bottom);

  auto integrand = [&](double q) {
    double sum = 0.0;
    for (Polarization pol : {Polarization::p, Polarization::s}) {
      const std::complex<double> r_top = r_stack_complex(cfg.top, gap_eps, omega_c, q, pol);
      const std::complex<double> r_bot =
          symmetric ? r_top : r_stack_complex(cfg.bottom, gap_eps, omega_c, q, pol);
      const std::complex<double> kz = kz_complex(gap_eps, omega_c, q);
      const std::complex<double> w =
          1.0 - r_top * r_bot * std::exp(-2.0 * kz * length);
      sum += std::log(std::abs(w));  // Re ln(w), free of branch cuts
    }
    return q * sum;
  };

  const double q_ref = std::max(omega / c_light, pi / length);
  const double scale = hbar * zeta3 / (8.0 * pi * pi * length * length);
  const double prefactor = hbar / (4.0 * pi * pi);
  // absolute floor: the integrand crosses zero, so a pure relative target is
  // unreachable near the nodes
  const QuadResult q = integrate_to_infinity(integrand, 0.0, q_ref, spec.rel_tol,
                                             spec.rel_tol * scale / prefactor,
                                             spec.max_subdivisions);
  if (!q.converged)
    throw ConvergenceError("real-frequency diagnostic did not converge",
                           prefactor * q.value,
                           std::abs(q.value) > 0.0 ? q.abs_error / std::abs(q.value)
                                                   : q.abs_error);
  return prefactor * q.value;
}

/// Helmholtz free energy per unit area at T > 0:
///   F/S = (k_B T / 2 pi) sum'_j int q dq sum_pol ln(1 - r^- r^+ e^{-2 k_z L})
/// over Matsubara frequencies xi_j = 2 pi j k_B T / hbar, the j = 0 term
/// half-weighted and evaluated through the static reflection rules. The sum
/// stops once five consecutive terms fall below matsubara_rel_cutoff of the
/// accumulated value; a geometric tail estimate joins the error budget.
inline EnergyResult free_energy_T(const CavityConfig& cfg,
                                  const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  if (!(cfg.temperature > 0.0))
    throw std::invalid_argument("free_energy_T: requires T > 0 (use casimir_energy_T0)");

  const double xi_step = 2.0 * pi * k_boltzmann * cfg.temperature / hbar;
  const double inner_tol = 0.1 * spec.rel_tol;
  const double term_prefactor = k_boltzmann * cfg.temperature / (2.0 * pi);
  const double sample_prefactor = hbar / (4.0 * pi * pi);

  EnergyResult result;
  double sum = 0.0;
  double err = 0.0;
  double prev_mag = 0.0;
  double last_mag = 0.0;
  double inner_scale = 0.0;
  int consecutive_small = 0;
  int terms = 0;

  for (int j = 0; j < spec.matsubara_max_terms; ++j) {
    const double xi = xi_step * j;
    const detail::InnerIntegral inner = detail::inner_q_integral(
        cfg, xi, inner_tol, 1e-2 * inner_tol * inner_scale, spec.max_subdivisions);
    inner_scale = std::max(inner_scale, std::abs(inner.value));
    const double weight = (j == 0) ? 0.5 : 1.0;
    sum += weight * inner.value;
    err += weight * inner.abs_error;
    ++terms;
    if (spec.record_integrand)
      result.xi_integrand_samples.push_back({xi, sample_prefactor * inner.value});

    prev_mag = last_mag;
    last_mag = std::abs(weight * inner.value);
    if (last_mag <= spec.matsubara_rel_cutoff * std::abs(sum))
      ++consecutive_small;
    else
      consecutive_small = 0;
    if (j >= 1 && consecutive_small >= 5) break;
  }

  // geometric tail bound from the final term ratio
  double tail = 0.0;
  if (last_mag > 0.0) {
    const double ratio = (prev_mag > 0.0) ? std::min(last_mag / prev_mag, 0.99) : 0.5;
    tail = last_mag * ratio / (1.0 - ratio);
  }
  err += tail;

  const double achieved =
      (std::abs(sum) > 0.0 ? err / std::abs(sum) : err) + inner_tol;
  if (consecutive_small < 5 && terms >= spec.matsubara_max_terms)
    throw ConvergenceError("Matsubara sum did not converge within the term budget",
                           term_prefactor * sum, achieved);

  result.u_per_area = term_prefactor * sum;
  result.rel_tol_achieved = achieved;
  result.matsubara_terms_used = terms;
  return result;
}

/// The half-weighted j = 0 Matsubara term alone; equals the full free energy
/// in the classical (high temperature / large gap) limit, where it scales as
/// k_B T / L^2 and the gap permittivity drops out entirely.
inline double classical_free_energy(const CavityConfig& cfg,
                                    const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  if (!(cfg.temperature > 0.0))
    throw std::invalid_argument("classical_free_energy: requires T > 0");
  const detail::InnerIntegral inner =
      detail::inner_q_integral(cfg, 0.0, 0.1 * spec.rel_tol, 0.0, spec.max_subdivisions);
  return k_boltzmann * cfg.temperature / (4.0 * pi) * inner.value;
}

/// Energy difference between the coupled cavity and the same cavity with the
/// gap coupling switched off. Dispatches on T; the error budget is the sum
/// of both converged tolerances.
inline EnergyResult delta_U(const CavityConfig& cfg, const QuadratureSpec& spec = {}) {
  cfg.validate();
  const CavityConfig off = cfg.decoupled();
  const bool zero_t = (cfg.temperature == 0.0);
  const EnergyResult on = zero_t ? casimir_energy_T0(cfg, spec) : free_energy_T(cfg, spec);
  if (cfg.gap == off.gap) {
    EnergyResult null = on;
    null.u_per_area = 0.0;
    return null;  // g = 0 already: the difference is exactly zero
  }
  const EnergyResult base = zero_t ? casimir_energy_T0(off, spec) : free_energy_T(off, spec);

  EnergyResult result;
  result.u_per_area = on.u_per_area - base.u_per_area;
  const double abs_err = on.rel_tol_achieved * std::abs(on.u_per_area) +
                         base.rel_tol_achieved * std::abs(base.u_per_area);
  result.rel_tol_achieved =
      std::abs(result.u_per_area) > 0.0 ? abs_err / std::abs(result.u_per_area) : abs_err;
  result.matsubara_terms_used =
      std::max(on.matsubara_terms_used, base.matsubara_terms_used);
  return result;
}

/// Energy per molecule: delta_u / (rho L), with rho the molecular
/// concentration in the gap.
inline double per_molecule(double delta_u, double rho, double gap_length) {
  if (!(rho > 0.0)) throw std::invalid_argument("per_molecule: rho must be > 0");
  if (!(gap_length > 0.0)) throw std::invalid_argument("per_molecule: L must be > 0");
  return delta_u / (rho * gap_length);
}

/// Fraction of the zero-temperature energy accumulated below xi_cut:
/// int_0^cut U_xi dxi / int_0^inf U_xi dxi, in [0, 1].
inline double low_frequency_weight(const CavityConfig& cfg, double xi_cut,
                                   const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  if (cfg.temperature != 0.0)
    throw std::invalid_argument("low_frequency_weight: requires T = 0");
  if (xi_cut < 0.0) throw std::domain_error("low_frequency_weight: xi_cut must be >= 0");
  if (xi_cut == 0.0) return 0.0;

  const double inner_tol = 0.1 * spec.rel_tol;
  double inner_scale = 0.0;
  auto f = [&](double xi) {
    const detail::InnerIntegral inner = detail::inner_q_integral(
        cfg, xi, inner_tol, 1e-2 * inner_tol * inner_scale, spec.max_subdivisions);
    inner_scale = std::max(inner_scale, std::abs(inner.value));
    return inner.value;
  };

  const double ref = detail::xi_reference(cfg);
  // both pieces in the mapped t = xi/(ref + xi) coordinates
  auto mapped = [&](double t) {
    const double om = 1.0 - t;
    return f(ref * t / om) * ref / (om * om);
  };
  const double t_cut = xi_cut / (ref + xi_cut);
  const QuadResult low = integrate_adaptive(mapped, 0.0, t_cut, 0.5 * spec.rel_tol, 0.0,
                                            spec.max_subdivisions);
  const QuadResult all = integrate_adaptive(mapped, 0.0, 1.0, 0.5 * spec.rel_tol, 0.0,
                                            spec.max_subdivisions);
  if (!low.converged || !all.converged)
    throw ConvergenceError("low-frequency weight quadrature did not converge",
                           low.value / all.value, spec.rel_tol);
  return low.value / all.value;
}

}  // namespace cavity

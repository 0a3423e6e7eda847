#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cavity/constants.hpp"
#include "cavity/dielectric.hpp"

// Reflection amplitudes of layered mirrors on the imaginary frequency axis
// (the Lifshitz integrand ingredients) and normal-incidence transfer-matrix
// transmission at real frequency (for spectra).
//
// Sign convention: looking from the gap into a perfect conductor,
// r_p = +1 and r_s = -1. Only products r_top * r_bottom enter the energy,
// so the convention is internal, but it is fixed and tested.

namespace cavity {

enum class Polarization { p, s };

inline constexpr double half_space = std::numeric_limits<double>::infinity();

struct Layer {
  DielectricModel material;
  double thickness = half_space;  // m; half_space marks the terminal medium

  bool operator==(const Layer&) const = default;
};

/// Ordered finite layers terminated by a half-space; layers.front() is
/// adjacent to the cavity gap.
struct MirrorStack {
  std::vector<Layer> layers;

  static MirrorStack pec() { return {{Layer{PerfectConductor{}, half_space}}}; }
  static MirrorStack semi_infinite(DielectricModel m) {
    return {{Layer{std::move(m), half_space}}};
  }

  void validate() const {
    if (layers.empty()) throw std::invalid_argument("stack: must contain at least one layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      cavity::validate(layers[i].material);
      const bool last = (i + 1 == layers.size());
      if (last && layers[i].thickness != half_space)
        throw std::invalid_argument("stack: last layer must be a half-space");
      if (!last && !(layers[i].thickness > 0.0 && layers[i].thickness < half_space))
        throw std::invalid_argument("stack: finite layers need thickness > 0");
    }
  }

  bool operator==(const MirrorStack&) const = default;
};

/// Transverse decay constant sqrt(q^2 + eps xi^2/c^2) at imaginary frequency;
/// real and >= q for passive media.
inline double kz_imag(double eps, double xi, double q) {
  if (xi < 0.0 || q < 0.0) throw std::domain_error("kz_imag: xi and q must be >= 0");
  const double w = std::sqrt(eps) * xi / c_light;
  return std::hypot(q, w);
}

/// Fresnel amplitude of a single interface, incidence from medium a.
inline double r_interface(double eps_a, double kz_a, double eps_b, double kz_b,
                          Polarization pol) {
  const double num = (pol == Polarization::p) ? eps_b * kz_a - eps_a * kz_b
                                              : kz_a - kz_b;
  const double den = (pol == Polarization::p) ? eps_b * kz_a + eps_a * kz_b
                                              : kz_a + kz_b;
  if (den == 0.0)
    throw std::domain_error("r_interface: vanishing denominator (non-passive input)");
  return num / den;
}

namespace detail {

// Airy recursion step, deepest interface first:
//   R_j = (r_j + R_{j+1} X_j) / (1 + r_j R_{j+1} X_j),  X_j = decay through layer j.
template <class Scalar>
Scalar airy_combine(Scalar r_if, Scalar r_behind, Scalar decay) {
  const Scalar x = r_behind * decay;
  return (r_if + x) / (Scalar(1) + r_if * x);
}

inline double pec_amplitude(Polarization pol) {
  return pol == Polarization::p ? 1.0 : -1.0;
}

}  // namespace detail

/// A mirror stack prepared for repeated evaluation at one imaginary
/// frequency: permittivities and decay slopes are cached so reflect(q) does
/// no allocation. xi = 0 switches to the dedicated static-limit rules:
/// all transverse wave vectors equal q, s-interfaces between finite media
/// vanish, p-interfaces reduce to the electrostatic contrast, Drude layers
/// reflect r_p = 1 / r_s = 0, and a perfect conductor keeps r_s = -1.
class PreparedStack {
 public:
  PreparedStack(const MirrorStack& stack, double gap_eps, double xi)
      : xi_(xi), gap_eps_(gap_eps) {
    stack.validate();
    if (xi < 0.0) throw std::domain_error("r_stack: xi must be >= 0");
    if (!(gap_eps >= 1.0))
      throw std::invalid_argument("r_stack: gap permittivity must be >= 1");

    // a perfect conductor or (statically) a Drude layer hides what is behind
    std::size_t n = stack.layers.size();
    for (std::size_t i = 0; i < stack.layers.size(); ++i) {
      const bool opaque = is_pec(stack.layers[i].material) ||
                          (xi == 0.0 && static_eps_zero(stack.layers[i].material).divergent);
      if (opaque) {
        n = i + 1;
        break;
      }
    }
    layers_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Prepared p;
      p.thickness = stack.layers[i].thickness;
      p.pec = is_pec(stack.layers[i].material);
      if (!p.pec) {
        if (xi == 0.0) {
          const StaticEps se = static_eps_zero(stack.layers[i].material);
          p.drude_static = se.divergent;
          p.eps = se.divergent ? 0.0 : se.value;
          p.slope = 0.0;
        } else {
          p.eps = eps_imag(stack.layers[i].material, xi);
          p.slope = std::sqrt(p.eps) * xi / c_light;
        }
      }
      layers_.push_back(p);
    }
    gap_slope_ = (xi == 0.0) ? 0.0 : std::sqrt(gap_eps) * xi / c_light;
  }

  double reflect(double q, Polarization pol) const {
    if (q < 0.0) throw std::domain_error("r_stack: q must be >= 0");
    return xi_ == 0.0 ? reflect_static(q, pol) : reflect_generic(q, pol);
  }

 private:
  struct Prepared {
    double eps = 1.0;
    double slope = 0.0;  // sqrt(eps) xi / c
    double thickness = half_space;
    bool pec = false;
    bool drude_static = false;
  };

  double reflect_generic(double q, Polarization pol) const {
    const std::size_t n = layers_.size();
    const double kz_gap = std::hypot(q, gap_slope_);
    double r_behind = 0.0;
    for (std::size_t idx = n; idx-- > 0;) {
      const Prepared& layer = layers_[idx];
      const double eps_left = (idx == 0) ? gap_eps_ : layers_[idx - 1].eps;
      const double kz_left =
          (idx == 0) ? kz_gap : std::hypot(q, layers_[idx - 1].slope);
      const double r_if =
          layer.pec ? detail::pec_amplitude(pol)
                    : r_interface(eps_left, kz_left, layer.eps,
                                  std::hypot(q, layer.slope), pol);
      if (idx + 1 == n)
        r_behind = r_if;
      else
        r_behind = detail::airy_combine(
            r_if, r_behind, std::exp(-2.0 * std::hypot(q, layer.slope) * layer.thickness));
    }
    return r_behind;
  }

  double reflect_static(double q, Polarization pol) const {
    const std::size_t n = layers_.size();
    double r_behind = 0.0;
    for (std::size_t idx = n; idx-- > 0;) {
      const Prepared& layer = layers_[idx];
      double r_if;
      if (layer.pec) {
        r_if = detail::pec_amplitude(pol);
      } else if (layer.drude_static) {
        r_if = (pol == Polarization::p) ? 1.0 : 0.0;
      } else if (pol == Polarization::p) {
        const double eps_left = (idx == 0) ? gap_eps_ : layers_[idx - 1].eps;
        r_if = (layer.eps - eps_left) / (layer.eps + eps_left);
      } else {
        r_if = 0.0;
      }
      if (idx + 1 == n)
        r_behind = r_if;
      else
        r_behind = detail::airy_combine(r_if, r_behind,
                                        std::exp(-2.0 * q * layer.thickness));
    }
    return r_behind;
  }

  double xi_ = 0.0;
  double gap_eps_ = 1.0;
  double gap_slope_ = 0.0;
  std::vector<Prepared> layers_;
};

/// Reflection amplitude of a mirror stack seen from the gap at imaginary
/// frequency xi and in-plane momentum q.
inline double r_stack(const MirrorStack& stack, double gap_eps, double xi, double q,
                      Polarization pol) {
  return PreparedStack(stack, gap_eps, xi).reflect(q, pol);
}

/// Transverse wave vector sqrt(q^2 - eps omega^2/c^2) continued to complex
/// frequency; principal branch, Re >= 0, so exp(-2 kz L) decays.
inline std::complex<double> kz_complex(std::complex<double> eps,
                                       std::complex<double> omega, double q) {
  const std::complex<double> w2 = eps * omega * omega / (c_light * c_light);
  return std::sqrt(std::complex<double>(q * q, 0.0) - w2);
}

/// Stack reflection continued to complex frequency in the upper half-plane
/// (used by the real-frequency integrand diagnostic).
inline std::complex<double> r_stack_complex(const MirrorStack& stack,
                                            std::complex<double> gap_eps,
                                            std::complex<double> omega, double q,
                                            Polarization pol) {
  stack.validate();
  using cplx = std::complex<double>;
  std::size_t n = stack.layers.size();
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    if (is_pec(stack.layers[i].material)) {
      n = i + 1;
      break;
    }
  }
  std::vector<cplx> eps(n), kz(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_pec(stack.layers[i].material)) continue;  // only possible as terminal
    eps[i] = eps_real(stack.layers[i].material, omega);
    kz[i] = kz_complex(eps[i], omega, q);
  }
  const cplx kz_gap = kz_complex(gap_eps, omega, q);

  auto r_if_c = [](cplx ea, cplx ka, cplx eb, cplx kb, Polarization p) {
    return (p == Polarization::p) ? (eb * ka - ea * kb) / (eb * ka + ea * kb)
                                  : (ka - kb) / (ka + kb);
  };

  cplx r_behind = 0.0;
  for (std::size_t idx = n; idx-- > 0;) {
    const cplx eps_left = (idx == 0) ? gap_eps : eps[idx - 1];
    const cplx kz_left = (idx == 0) ? kz_gap : kz[idx - 1];
    const cplx r_if = is_pec(stack.layers[idx].material)
                          ? cplx(detail::pec_amplitude(pol), 0.0)
                          : r_if_c(eps_left, kz_left, eps[idx], kz[idx], pol);
    if (idx + 1 == n)
      r_behind = r_if;
    else
      r_behind = detail::airy_combine(
          r_if, r_behind, std::exp(-2.0 * kz[idx] * stack.layers[idx].thickness));
  }
  return r_behind;
}

/// Planar region sequence for transmission: entry half-space, finite films
/// (the cavity gap is one of them), exit half-space.
struct PlanarRegions {
  DielectricModel entry;
  std::vector<Layer> films;
  DielectricModel exit;
};

/// Normal-incidence intensity transmittance through the region sequence at
/// real angular frequency, by the characteristic-matrix method. The entry
/// medium must be lossless so the incident power is well defined.
inline double transmission(const PlanarRegions& regions, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("transmission: omega must be > 0");
  if (is_pec(regions.entry) || is_pec(regions.exit))
    throw std::domain_error("transmission: perfect conductors do not transmit");
  using cplx = std::complex<double>;
  using namespace std::complex_literals;

  const cplx n_in = std::sqrt(eps_real(regions.entry, omega));
  const cplx n_out = std::sqrt(eps_real(regions.exit, omega));
  if (std::abs(n_in.imag()) > 1e-12 * std::abs(n_in))
    throw std::domain_error("transmission: entry medium must be lossless");

  // characteristic matrix of the film sequence, fields (E, H)
  cplx m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  for (const Layer& film : regions.films) {
    if (is_pec(film.material))
      throw std::domain_error("transmission: perfect conductors do not transmit");
    if (!(film.thickness > 0.0) || film.thickness == half_space)
      throw std::invalid_argument("transmission: films must have finite thickness");
    const cplx n = std::sqrt(eps_real(film.material, omega));
    const cplx delta = n * omega * film.thickness / c_light;
    const cplx cosd = std::cos(delta);
    const cplx sind = std::sin(delta);
    const cplx a01 = 1i * sind / n;
    const cplx a10 = 1i * n * sind;
    const cplx t00 = m00 * cosd + m01 * a10;
    const cplx t01 = m00 * a01 + m01 * cosd;
    const cplx t10 = m10 * cosd + m11 * a10;
    const cplx t11 = m10 * a01 + m11 * cosd;
    m00 = t00;
    m01 = t01;
    m10 = t10;
    m11 = t11;
  }

  const cplx bb = m00 + m01 * n_out;
  const cplx cc = m10 + m11 * n_out;
  const cplx den = n_in.real() * bb + cc;
  return 4.0 * n_in.real() * n_out.real() / std::norm(den);
}

}  // namespace cavity

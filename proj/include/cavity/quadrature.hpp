#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

// Adaptive Gauss-Kronrod quadrature on finite intervals plus a rational map
// for semi-infinite domains. The subdivision policy is deterministic (worst
// panel first, ties broken by creation order), so repeated runs with the same
// tolerances produce bit-identical results.

namespace cavity {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1]. Gauss nodes are the
// odd-indexed abscissae plus the center.
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  long seq;  // creation order, tie-breaker for determinism
};

// Single Kronrod panel with the usual QUADPACK-style error rescaling.
template <class F>
Panel gk15_panel(F&& f, double a, double b, long seq) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double eps = std::numeric_limits<double>::epsilon();

  double fv1[7], fv2[7];
  const double fc = f(mid);
  double res_g = gk15_wg[3] * fc;
  double res_k = gk15_wk[7] * fc;
  double res_abs = gk15_wk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * gk15_x[j];
    fv1[j] = f(mid - dx);
    fv2[j] = f(mid + dx);
    const double fsum = fv1[j] + fv2[j];
    res_k += gk15_wk[j] * fsum;
    res_abs += gk15_wk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) res_g += gk15_wg[j / 2] * fsum;
  }
  const double res_kh = res_k * 0.5;
  double res_asc = gk15_wk[7] * std::abs(fc - res_kh);
  for (int j = 0; j < 7; ++j)
    res_asc += gk15_wk[j] * (std::abs(fv1[j] - res_kh) + std::abs(fv2[j] - res_kh));

  const double value = res_k * half;
  res_abs *= std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0)
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(err, 50.0 * eps * res_abs);
  return Panel{a, b, value, err, seq};
}

inline bool worse(const Panel& lhs, const Panel& rhs) {
  if (lhs.error != rhs.error) return lhs.error > rhs.error;
  return lhs.seq < rhs.seq;
}

}  // namespace detail

/// Globally adaptive integration of f over [a, b]: bisect the panel with the
/// largest error estimate until sum(err) <= max(abs_tol, rel_tol*|sum(val)|).
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                              double abs_tol = 0.0, int max_subdivisions = 4000) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }

  std::vector<detail::Panel> panels;
  panels.reserve(64);
  long seq = 0;
  panels.push_back(detail::gk15_panel(f, a, b, seq++));

  double total_value = panels[0].value;
  double total_error = panels[0].error;

  while (static_cast<int>(panels.size()) <= max_subdivisions) {
    if (total_error <= std::max(abs_tol, rel_tol * std::abs(total_value))) {
      out.converged = true;
      break;
    }
    auto worst = std::min_element(panels.begin(), panels.end(),
                                  [](const auto& x, const auto& y) { return detail::worse(x, y); });
    const detail::Panel bad = *worst;
    const double mid = 0.5 * (bad.a + bad.b);
    if (mid == bad.a || mid == bad.b) break;  // interval at machine resolution
    detail::Panel left = detail::gk15_panel(f, bad.a, mid, seq++);
    detail::Panel right = detail::gk15_panel(f, mid, bad.b, seq++);
    total_value += left.value + right.value - bad.value;
    total_error += left.error + right.error - bad.error;
    *worst = left;
    panels.push_back(right);
  }

  // Deterministic final accumulation: sum panels ordered by left endpoint.
  std::sort(panels.begin(), panels.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  double value = 0.0, error = 0.0;
  for (const auto& p : panels) {
    value += p.value;
    error += p.error;
  }
  out.value = value;
  out.abs_error = error;
  out.subdivisions = static_cast<int>(panels.size());
  if (!out.converged)
    out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

/// Integral over [a, inf) via the rational map x = a + scale*t/(1-t). The
/// scale sets where half of the mapped interval lands (x = a + scale at
/// t = 1/2); pick it near the decay scale of the integrand.
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, double scale, double rel_tol,
                                 double abs_tol = 0.0, int max_subdivisions = 4000) {
  auto mapped = [&f, a, scale](double t) {
    const double om = 1.0 - t;
    const double x = a + scale * t / om;
    return f(x) * scale / (om * om);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, rel_tol, abs_tol, max_subdivisions);
}

}  // namespace cavity

#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "stasep/common.hpp"

namespace stasep {

namespace detail {

// 10-point Gauss-Legendre on [a,b] split into `panels` equal panels.
template <typename F>
Complex gl10(F&& f, double a, double b, int panels) {
  static const double xs[5] = {0.14887433898163121, 0.43339539412924719, 0.67940956829902441,
                               0.86506336668898451, 0.97390652851717172};
  static const double ws[5] = {0.29552422471475287, 0.26926671930999635, 0.21908636251598204,
                               0.14945134915058059, 0.066671344308688138};
  Complex total(0.0, 0.0);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    Complex acc(0.0, 0.0);
    for (int i = 0; i < 5; ++i)
      acc += ws[i] * (f(mid + 0.5 * h * xs[i]) + f(mid - 0.5 * h * xs[i]));
    total += acc * (0.5 * h);
  }
  return total;
}

template <typename F>
Complex gl10_doubling(F&& f, double a, double b, int start_panels, double abs_tol) {
  int panels = start_panels;
  Complex est = gl10(f, a, b, panels);
  for (int it = 0; it < 10; ++it) {
    panels *= 2;
    const Complex next = gl10(f, a, b, panels);
    const double diff = std::abs(next - est);
    est = next;
    if (diff <= std::max(abs_tol, 1e-13 * std::abs(next))) return est;
  }
  throw NonConvergenceError("oscillatory quadrature did not settle", std::abs(est), std::abs(est));
}

}  // namespace detail

// Maclaurin two-series evaluation, long double accumulation. Adequate for
// |z| <= 8 where the growing terms still leave ~1e-13 absolute accuracy.
inline double airy_series(double z) {
  const long double c1 = 0.35502805388781723926L;   // Ai(0)
  const long double c2 = 0.25881940379280679841L;   // -Ai'(0)
  const long double z3 = (long double)z * z * z;
  long double f = 1.0L, tf = 1.0L;
  long double g = (long double)z, tg = (long double)z;
  for (int k = 0; k < 400; ++k) {
    tf *= z3 / ((3.0L * k + 2.0L) * (3.0L * k + 3.0L));
    tg *= z3 / ((3.0L * k + 3.0L) * (3.0L * k + 4.0L));
    f += tf;
    g += tg;
    if (std::fabs((double)tf) < 1e-25 && std::fabs((double)tg) < 1e-25) break;
  }
  return double(c1 * f - c2 * g);
}

// Contour evaluation of Ai(z) = (1/2pi i) \int e^{w^3/3 - zw} dw along a
// descent-adapted path: a vertical line through the positive saddle for
// z >= 0, and the two saddle rays joined by the imaginary segment for z < 0.
inline double airy_contour(double z) {
  if (z >= 0.0) {
    const double x0 = std::max(std::sqrt(z), 0.7);
    const double U = std::sqrt(60.0 / x0) + 2.0;
    auto f = [&](double u) {
      const Complex w(x0, u);
      return std::exp(w * w * w / 3.0 - z * w);
    };
    const double scale = std::exp(x0 * x0 * x0 / 3.0 - z * x0);
    const Complex v = detail::gl10_doubling(f, 0.0, U, 32, 1e-15 * scale);
    return v.real() / kPi;  // symmetric half, (1/2pi) * 2 Re
  }
  const double a = std::sqrt(-z);
  // vertical segment: purely oscillatory phase theta(u) = |z| u - u^3/3
  auto fv = [&](double u) { return std::exp(Complex(0.0, -z * u - u * u * u / 3.0)); };
  const Complex iv = detail::gl10_doubling(fv, 0.0, a, std::max(32, int(8.0 * a * -z / 6.28) + 1),
                                           1e-14);
  // saddle ray from +ia in direction e^{i pi/3}
  const Complex dir = std::exp(Complex(0.0, kPi / 3.0));
  double S = 1.0;
  while (0.5 * std::sqrt(3.0) * a * S * S + S * S * S / 3.0 < 50.0) S += 0.5;
  auto fr = [&](double s) {
    const Complex w = Complex(0.0, a) + dir * s;
    return std::exp(w * w * w / 3.0 - z * w) * dir;
  };
  const Complex ir = detail::gl10_doubling(fr, 0.0, S, std::max(32, int(3.0 * a) + 1), 1e-14);
  // conjugate symmetry folds the lower half onto the upper one
  return iv.real() / kPi + ir.imag() / kPi;
}

// Ai(z) with the documented method split; supported for |z| <= 30.
inline double airy(double z) {
  if (std::abs(z) > 30.0) throw DomainError("airy: |z| > 30 unsupported");
  if (std::abs(z) <= 8.0) return airy_series(z);
  return airy_contour(z);
}

namespace detail {

// Asymptotic tails beyond the supported contour range; at |z| > 30 the
// optimally truncated series carries ~e^{-2 zeta} relative error. Internal
// helper for composite kernels whose Airy argument can run far out.
inline double airy_tail(double z) {
  const double x = std::abs(z);
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  // u_{k+1}/u_k = (3k+5/2)(3k+3/2)(3k+1/2) / (54 (k+1)(k+1/2))
  auto next_u = [](double u, int k) {
    return u * (3.0 * k + 2.5) * (3.0 * k + 1.5) * (3.0 * k + 0.5) /
           (54.0 * (k + 1.0) * (k + 0.5));
  };
  if (z > 0.0) {
    double sum = 0.0, u = 1.0, term = 1.0;
    for (int k = 0; k < 200; ++k) {
      const double t = (k % 2 == 0 ? 1.0 : -1.0) * u / term;
      sum += t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
      u = next_u(u, k);
      term *= zeta;
      if (u / term > std::abs(t) * zeta) break;  // past optimal truncation
    }
    const double lg = -zeta - 0.5 * std::log(kPi) - std::log(2.0) - 0.25 * std::log(x);
    return std::exp(lg) * sum;
  }
  double uk[40];
  uk[0] = 1.0;
  for (int k = 0; k + 1 < 40; ++k) uk[k + 1] = next_u(uk[k], k);
  double P = 0.0, Q = 0.0, zp = 1.0;
  for (int k = 0; 2 * k + 1 < 40; ++k) {
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    P += sgn * uk[2 * k] / zp;
    zp *= zeta;
    Q += sgn * uk[2 * k + 1] / zp;
    zp *= zeta;
    if (uk[2 * k + 1] / zp * zeta > uk[2 * k] / (zp / zeta / zeta)) break;
  }
  const double phase = zeta - kPi / 4.0;
  return (std::cos(phase) * P + std::sin(phase) * Q) / (std::sqrt(kPi) * std::pow(x, 0.25));
}

inline double airy_any(double z) {
  if (std::abs(z) <= 30.0) return airy(z);
  return airy_tail(z);
}

}  // namespace detail

}  // namespace stasep

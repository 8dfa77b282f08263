#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "stasep/common.hpp"
#include "stasep/pgf_model.hpp"
#include "stasep/series.hpp"

namespace stasep {

struct ContourSpec {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  int nodes = 256;  // starting node count, power of two, >= 64
};

namespace detail {

// Trapezoidal rule on a circle with node doubling until two successive
// estimates agree to 1e-12 relative or 1e-14 absolute. Node sets interleave,
// so earlier evaluations are reused.
inline Complex doubling_trapezoid(const std::function<Complex(double)>& term, int start_nodes,
                                  int cap = 1 << 16) {
  int n = std::max(64, start_nodes);
  Complex sum(0.0, 0.0);
  double peak = 0.0;  // largest term magnitude: sets the attainable noise floor
  for (int j = 0; j < n; ++j) {
    const Complex v = term(2.0 * kPi * j / n);
    peak = std::max(peak, std::abs(v));
    sum += v;
  }
  Complex est = sum / double(n);
  Complex prev = est;
  while (n < cap) {
    Complex odd(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const Complex v = term(2.0 * kPi * (2 * j + 1) / (2 * n));
      peak = std::max(peak, std::abs(v));
      odd += v;
    }
    sum += odd;
    n *= 2;
    const Complex next = sum / double(n);
    const double diff = std::abs(next - est);
    prev = est;
    est = next;
    const double floor =
        std::max({1e-12 * std::abs(next), 1e-14, 8.0 * 2.220446049250313e-16 * peak});
    if (diff <= floor) return est;
  }
  throw NonConvergenceError("circle quadrature did not converge at node cap", std::abs(est),
                            std::abs(prev));
}

inline double require_real(Complex v, const char* what, double tol = 1e-10) {
  if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v.real())))
    throw NonConvergenceError(std::string(what) + ": imaginary residue exceeds tolerance",
                              v.imag(), tol);
  return v.real();
}

}  // namespace detail

// (1/2pi i) \oint f(w) w^{-k-1} dw over the given circle.
inline Complex circle_coefficient(const std::function<Complex(Complex)>& f, long long k,
                                  const ContourSpec& spec) {
  const Complex c = spec.center;
  const double r = spec.radius;
  auto term = [&](double th) {
    const Complex e = std::exp(Complex(0.0, th));
    const Complex w = c + r * e;
    Complex p = k >= 0 ? 1.0 / pow_int(w, k + 1) : pow_int(w, -k - 1);
    return f(w) * p * r * e;
  };
  return detail::doubling_trapezoid(term, spec.nodes);
}

// F_n(x,t): Schuetz-type one-dimensional building block, contour around 0 and 1.
// Falls back to a two-circle decomposition when the radius of convergence
// leaves no room for a single circle through (1, R).
inline double F_n(const PgfModel& model, int n, long long x, double t, int start_nodes = 256) {
  if (t < 0.0) throw DomainError("F_n: t must be >= 0");
  const double R = model.radius();
  auto integrand = [&](Complex w) {
    const Complex a = n >= 0 ? 1.0 / pow_int(1.0 - w, n) : pow_int(1.0 - w, -n);
    const long long xp = x - n;  // remaining power: w^{-(xp+1)}
    const Complex b = xp >= 0 ? 1.0 / pow_int(w, xp) : pow_int(w, -xp);
    return a * b / w * model.eval_pow_t(w, t);
  };
  const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
  if (R > 1.0 + 1e-6) {
    // without a pole at 1 (n <= 0) the unit circle keeps polynomial factors
    // small; with one, stand off a little while staying inside the domain
    const double rho = n <= 0 ? 1.0 : (std::isinf(R) ? 1.35 : std::min(1.35, std::sqrt(R)));
    auto term = [&](double th) {
      const Complex e = std::exp(Complex(0.0, th));
      return integrand(rho * e) * rho * e;
    };
    return sgn * detail::require_real(detail::doubling_trapezoid(term, start_nodes), "F_n");
  }
  // two-contour decomposition: circle around 0 of radius < 1 plus a small
  // circle around 1 capturing the (1-w)^{-n} pole (only present for n >= 1)
  Complex total(0.0, 0.0);
  {
    auto term = [&](double th) {
      const Complex e = std::exp(Complex(0.0, th));
      return integrand(0.5 * e) * 0.5 * e;
    };
    total += detail::doubling_trapezoid(term, start_nodes);
  }
  if (n >= 1) {
    const double delta = std::max((R - 1.0) * 0.5, 1e-8);
    auto term = [&](double th) {
      const Complex e = std::exp(Complex(0.0, th));
      return integrand(1.0 + delta * e) * delta * e;
    };
    total += detail::doubling_trapezoid(term, start_nodes);
  }
  return sgn * detail::require_real(total, "F_n");
}

namespace detail {

// Shared core for the two sweep kernels. The full integrand is assembled in
// log space so the 2^k / (1-w)^n factors cannot overflow before the
// normalized PGF ratio cancels them.
inline Complex sweep_quadrature(const PgfModel& model, double t, double radius, long long k,
                                long long two_pow,  // exponent of the 2^{..} prefactor
                                long long omw_pow,  // exponent of (1-w)
                                bool bar, int start_nodes) {
  const Complex half(0.5, 0.0);
  const bool poisson = model.kind() == ModelKind::ContinuousPoisson;
  long long ti = 0;
  if (!poisson) {
    ti = (long long)std::llround(t);
    if (ti < 0 || std::abs(t - double(ti)) > 1e-9)
      throw DomainError("discrete-time model requires integer t >= 0");
  }
  auto gz = [&](Complex a) {
    Complex acc(0.0, 0.0);
    for (std::size_t i = model.pmf().size(); i-- > 0;) acc = acc * a + model.pmf()[i];
    return acc;
  };
  auto term = [&](double th) -> Complex {
    const Complex e = std::exp(Complex(0.0, th));
    const Complex w = radius * e;
    Complex lg = double(omw_pow) * std::log(1.0 - w) + double(two_pow) * std::log(2.0) -
                 double(k) * std::log(Complex(radius, 0.0) * e);
    if (poisson) {
      const Complex arg = bar ? (1.0 - w) : w;
      lg += model.lambda() * (bar ? -t : t) * (gz(arg) - gz(half));
      if (lg.real() < -740.0) return Complex(0.0, 0.0);
      return std::exp(lg);
    }
    // discrete model: exact integer power of the (inverted) ratio
    const Complex num = bar ? model.eval_unchecked(half) : model.eval_unchecked(w);
    const Complex den = bar ? model.eval_unchecked(1.0 - w) : model.eval_unchecked(half);
    const Complex ratio_p = pow_int(num / den, ti);
    if (ratio_p == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
    if (lg.real() > 600.0 || lg.real() < -600.0) {
      const Complex full = lg + std::log(ratio_p);
      if (full.real() < -740.0) return Complex(0.0, 0.0);
      return std::exp(full);
    }
    return std::exp(lg) * ratio_p;
  };
  return doubling_trapezoid(term, start_nodes);
}

}  // namespace detail

// Contour radius for the bar kernel: keep zeros of M(1-w) outside the circle.
inline double sbar_radius(const PgfModel& model) {
  double r = 0.5;
  if (model.kind() == ModelKind::DiscretePmf) {
    for (int attempt = 0; attempt < 9; ++attempt) {
      double mn = kInf;
      for (int j = 0; j < 256; ++j) {
        const Complex w = r * std::exp(Complex(0.0, 2.0 * kPi * j / 256.0));
        mn = std::min(mn, std::abs(model.eval_unchecked(1.0 - w)));
      }
      if (mn > 1e-9) return r;
      r *= 0.8;
    }
    throw ZeroCrossingError("Sbar_kernel: M(1-w) vanishes on every candidate contour");
  }
  return r;
}

// S_{-t,-n}(z1,z2): coefficient-of-w^{n+z2-z1} form of (1-w)^n {M(w)/M(1/2)}^t.
inline double S_kernel(const PgfModel& model, double t, long long n, long long z1, long long z2,
                       double radius = 0.5, int start_nodes = 256) {
  if (t < 0.0) throw DomainError("S_kernel: t must be >= 0");
  const long long k = n + z2 - z1;
  if (k < 0) return 0.0;  // integrand analytic inside the contour
  const Complex v =
      detail::sweep_quadrature(model, t, radius, k, z1 - z2, n, /*bar=*/false, start_nodes);
  return detail::require_real(v, "S_kernel");
}

// Sbar_{-t,n}(z1,z2): coefficient-of-w^{n-1} form of
// (1-w)^{z2-z1+n-1} {M(1-w)/M(1/2)}^{-t}; the ratio is inverted before
// powering so rational M stays polynomial on the contour.
inline double Sbar_kernel(const PgfModel& model, double t, long long n, long long z1, long long z2,
                          double radius = -1.0, int start_nodes = 256) {
  if (t < 0.0) throw DomainError("Sbar_kernel: t must be >= 0");
  if (n <= 0) return 0.0;  // no pole at the origin
  const double r = radius > 0.0 ? radius : sbar_radius(model);
  const Complex v = detail::sweep_quadrature(model, t, r, n - 1, z2 - z1, z2 - z1 + n - 1,
                                             /*bar=*/true, start_nodes);
  return detail::require_real(v, "Sbar_kernel");
}

// Unnormalized gauge of the sweep kernels (plain M(w)^t and M(1-w)^{-t}),
// usable at small t; the composite product must agree with the normalized
// gauge.
inline double S_kernel_script(const PgfModel& model, double t, long long n, long long z1,
                              long long z2, double radius = 0.5, int start_nodes = 256) {
  const long long k = n + z2 - z1;
  if (k < 0) return 0.0;
  auto term = [&](double th) {
    const Complex e = std::exp(Complex(0.0, th));
    const Complex w = radius * e;
    const Complex lg = double(n) * std::log(1.0 - w) + double(z1 - z2) * std::log(2.0) -
                       double(k) * std::log(Complex(radius, 0.0) * e);
    return std::exp(lg) * model.eval_pow_t(w, t);
  };
  return detail::require_real(detail::doubling_trapezoid(term, start_nodes), "S_kernel_script");
}

inline double Sbar_kernel_script(const PgfModel& model, double t, long long n, long long z1,
                                 long long z2, double radius = -1.0, int start_nodes = 256) {
  if (n <= 0) return 0.0;
  const double r = radius > 0.0 ? radius : sbar_radius(model);
  auto term = [&](double th) {
    const Complex e = std::exp(Complex(0.0, th));
    const Complex w = r * e;
    const Complex lg = double(z2 - z1 + n - 1) * std::log(1.0 - w) +
                       double(z2 - z1) * std::log(2.0) -
                       double(n - 1) * std::log(Complex(r, 0.0) * e);
    if (model.kind() == ModelKind::ContinuousPoisson)
      return std::exp(lg + model.lambda() * (-t) *
                               ([&] {
                                 Complex acc(0.0, 0.0);
                                 for (std::size_t i = model.pmf().size(); i-- > 0;)
                                   acc = acc * (1.0 - w) + model.pmf()[i];
                                 return acc;
                               }() -
                                1.0));
    const long long ti = (long long)std::llround(t);
    return std::exp(lg) * pow_int(1.0 / model.eval_unchecked(1.0 - w), ti);
  };
  return detail::require_real(detail::doubling_trapezoid(term, start_nodes), "Sbar_kernel_script");
}

// Exact-series counterparts for polynomial M and integer t (cross-checks; the
// quadrature path is the production route).
inline double poly_at_half(const std::vector<double>& mp) {
  double acc = 0.0, pw = 1.0;
  for (double c : mp) {
    acc += c * pw;
    pw *= 0.5;
  }
  return acc;
}

inline double S_kernel_exact(const PgfModel& model, long long t, long long n, long long z1,
                             long long z2) {
  const long long k = n + z2 - z1;
  if (k < 0) return 0.0;
  const std::size_t len = std::size_t(k) + 1;
  const auto mp = series::model_poly(model);
  auto f = series::mul(series::one_minus_w_pow(n, len), series::pow(mp, t, len), len);
  return f[std::size_t(k)] * std::pow(2.0, double(z1 - z2)) / std::pow(poly_at_half(mp), double(t));
}

inline double Sbar_kernel_exact(const PgfModel& model, long long t, long long n, long long z1,
                                long long z2) {
  if (n <= 0) return 0.0;
  const std::size_t len = std::size_t(n);
  const auto mp = series::model_poly(model);
  // series of M(1-w) in powers of w
  std::vector<double> m1w(len, 0.0);
  {
    std::vector<double> acc(1, 1.0);  // (1-w)^j
    for (std::size_t j = 0; j < mp.size(); ++j) {
      for (std::size_t i = 0; i < acc.size() && i < len; ++i) m1w[i] += mp[j] * acc[i];
      acc = series::mul(acc, series::one_minus_w_pow(1, len), len);
    }
  }
  auto ratio_inv = series::inverse(m1w, len);        // (M(1-w))^{-1}
  auto powed = series::pow(ratio_inv, t, len);       // M(1-w)^{-t}
  auto f = series::mul(series::one_minus_w_pow(z2 - z1 + n - 1, len), powed, len);
  return f[len - 1] * std::pow(2.0, double(z2 - z1)) * std::pow(poly_at_half(mp), double(t));
}

// Quadrature-extracted series coefficients of M, truncated once the
// accumulated mass is within tail_tol of 1; independent cross-check of the
// per-kind closed forms.
struct CoefficientReport {
  std::vector<double> coeffs;
  double mass = 0.0;
  double min_coeff = 0.0;
  int truncation_index = 0;
};

inline CoefficientReport model_coefficients(const PgfModel& model, double tail_tol = 1e-14,
                                            int cap = 1 << 14) {
  CoefficientReport rep;
  rep.min_coeff = kInf;
  const double r = std::min(1.0, 0.9 * model.radius());
  for (int k = 0; k < cap; ++k) {
    ContourSpec spec{{0.0, 0.0}, r, 256};
    const Complex ck =
        circle_coefficient([&](Complex w) { return model.eval_unchecked(w); }, k, spec);
    const double c = detail::require_real(ck, "model_coefficients", 1e-8);
    rep.coeffs.push_back(c);
    rep.mass += c;
    rep.min_coeff = std::min(rep.min_coeff, c);
    rep.truncation_index = k;
    if (1.0 - rep.mass < tail_tol) return rep;
  }
  throw NonConvergenceError("model_coefficients: tail mass did not reach tolerance", rep.mass,
                            rep.mass);
}

}  // namespace stasep

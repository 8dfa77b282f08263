#pragma once

#include <vector>

#include "stasep/common.hpp"
#include "stasep/pgf_model.hpp"

namespace stasep {

// Dense power-series helpers used by the exact coefficient-extraction route
// for polynomial M and integer t. Vectors hold coefficients [w^0, w^1, ...].
namespace series {

inline std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b,
                               std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), len - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

inline std::vector<double> pow(std::vector<double> base, long long t, std::size_t len) {
  std::vector<double> acc(1, 1.0);
  while (t > 0) {
    if (t & 1) acc = mul(acc, base, len);
    base = mul(base, base, len);
    t >>= 1;
  }
  acc.resize(len, 0.0);
  return acc;
}

// (1 - w)^m for any integer m (binomial series when m < 0), truncated to len.
inline std::vector<double> one_minus_w_pow(long long m, std::size_t len) {
  std::vector<double> out(len, 0.0);
  if (m >= 0) {
    double c = 1.0;
    for (std::size_t k = 0; k < len; ++k) {
      if ((long long)k > m) break;
      out[k] = (k % 2 == 0) ? c : -c;
      c = c * double(m - (long long)k) / double(k + 1);
    }
  } else {
    const long long mm = -m;
    double c = 1.0;  // C(k+mm-1, mm-1)
    for (std::size_t k = 0; k < len; ++k) {
      out[k] = c;
      c = c * double((long long)k + mm) / double(k + 1);
    }
  }
  return out;
}

// 1 / a to length len; requires a[0] != 0.
inline std::vector<double> inverse(const std::vector<double>& a, std::size_t len) {
  if (a.empty() || a[0] == 0.0) throw DomainError("series inverse: zero constant term");
  std::vector<double> out(len, 0.0);
  out[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < len; ++k) {
    double s = 0.0;
    const std::size_t jmax = std::min(k, a.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) s += a[j] * out[k - j];
    out[k] = -s / a[0];
  }
  return out;
}

// Coefficients of M(w) as a finite polynomial; only defined for the
// polynomial kinds (Bernoulli and finite-support DiscretePmf).
inline std::vector<double> model_poly(const PgfModel& model) {
  switch (model.kind()) {
    case ModelKind::DiscreteBernoulli:
      return {1.0 - model.p(), model.p()};
    case ModelKind::DiscretePmf:
      if (model.tail_ratio() == 0.0) return model.pmf();
      throw DomainError("model_poly: geometric-tail pmf is not polynomial");
    default:
      throw DomainError("model_poly: model is not polynomial");
  }
}

inline bool is_polynomial(const PgfModel& model) {
  return model.kind() == ModelKind::DiscreteBernoulli ||
         (model.kind() == ModelKind::DiscretePmf && model.tail_ratio() == 0.0);
}

}  // namespace series

// Exact F_n for polynomial M and integer t >= 0. For n <= 0 this is a finite
// convolution; for n >= 1 it uses the tail recursion
// F_n(x) = F_{n-1}(x) + F_n(x+1) anchored at F_n(x) = 0 above the support.
inline double F_n_exact(const PgfModel& model, int n, long long x, long long t) {
  const auto mpoly = series::model_poly(model);
  const long long deg = (long long)mpoly.size() - 1;
  const long long top = t * deg;  // F_0 support is [0, top]
  if (n <= 0) {
    const long long k = x - n;  // coefficient order of w in (1-w)^{-n} M^t
    if (k < 0 || k > top - n) return 0.0;
    const std::size_t len = std::size_t(k) + 1;
    auto f = series::mul(series::one_minus_w_pow(-n, len), series::pow(mpoly, t, len), len);
    return (n % 2 == 0 ? 1.0 : -1.0) * f[std::size_t(k)];
  }
  // walk down from the top of the support, building tail sums level by level
  const long long hi = top + n;  // F_m(x) = 0 for x > top + m when m >= 1... use generous bound
  if (x > hi) return 0.0;
  std::vector<double> prev;  // F_{m-1} on [x, hi]
  const std::size_t len = std::size_t(hi - x) + 1;
  prev.resize(len);
  for (std::size_t i = 0; i < len; ++i) prev[i] = F_n_exact(model, 0, x + (long long)i, t);
  for (int m = 1; m <= n; ++m) {
    std::vector<double> cur(len, 0.0);
    double acc = 0.0;
    for (std::size_t i = len; i-- > 0;) {
      acc += prev[i];
      cur[i] = acc;
    }
    prev = std::move(cur);
  }
  return prev[0];
}

}  // namespace stasep

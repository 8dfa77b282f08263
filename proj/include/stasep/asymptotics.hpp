#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "stasep/airy.hpp"
#include "stasep/common.hpp"
#include "stasep/contour.hpp"
#include "stasep/path_kernel.hpp"
#include "stasep/pgf_model.hpp"
#include "stasep/rng.hpp"

namespace stasep {

// S_{t,x}(v,u) = t^{-1/3} exp(2x^3/(3t^2) - (v-u)x/t) Ai(-t^{-1/3}(v-u) + t^{-4/3} x^2),
// assembled in log space so the exponential prefactor cannot overflow.
inline double S_limit(double t_cap, double x_cap, double v, double u) {
  if (t_cap <= 0.0) throw DomainError("S_limit: t must be positive");
  const double d = v - u;
  const double arg = -d / std::cbrt(t_cap) + x_cap * x_cap / std::pow(t_cap, 4.0 / 3.0);
  const double ai = detail::airy_any(arg);
  if (ai == 0.0) return 0.0;
  const double expo = 2.0 * x_cap * x_cap * x_cap / (3.0 * t_cap * t_cap) - d * x_cap / t_cap;
  const double lg = expo + std::log(std::abs(ai)) - std::log(t_cap) / 3.0;
  if (lg < -740.0) return 0.0;
  if (lg > 709.0) throw DomainError("S_limit: prefactor overflow");
  return (ai > 0.0 ? 1.0 : -1.0) * std::exp(lg);
}

// Negative-time values come from the reflection S_{t,x}(v,u) = S_{-t,x}(u,v).
inline double S_limit_signed(double t_cap, double x_cap, double v, double u) {
  return t_cap > 0.0 ? S_limit(t_cap, x_cap, v, u) : S_limit(-t_cap, x_cap, u, v);
}

// Independent route: (1/2pi i) \int e^{(t/3)w^3 + x w^2 + (v-u)w} dw on a
// vertical line through the decay region.
inline double S_limit_contour(double t_cap, double x_cap, double v, double u) {
  if (t_cap <= 0.0) throw DomainError("S_limit_contour: t must be positive");
  const double d = v - u;
  const double x0 = std::max(0.8, (0.8 - x_cap) / t_cap);
  const double rate = t_cap * x0 + x_cap;  // Gaussian decay coefficient
  const double U = std::sqrt(60.0 / rate) + 2.0;
  auto f = [&](double uu) {
    const Complex w(x0, uu);
    return std::exp(t_cap / 3.0 * w * w * w + x_cap * w * w + d * w);
  };
  const Complex val = detail::gl10_doubling(f, 0.0, U, 32, 1e-14);
  return val.real() / kPi;
}

// Coordinate maps of the 1:2:3 scaling. Raw lattice arguments are rounded
// half-to-even; the effective continuum coordinates that the rounded values
// realize are back-solved and reported, together with the residuals, so
// convergence studies compare like with like.
struct ScalingFrame {
  // inputs
  double eps = 0.0, t_cap = 0.0, x_cap = 0.0, a_cap = 0.0, u = 0.0, v = 0.0;
  // lattice arguments
  double t = 0.0;  // real for continuous-time models, integer-valued for discrete
  long long n = 0, a = 0, z = 0, yprime = 0;
  // effective continuum coordinates after rounding
  double t_cap_eff = 0.0, a_eff = 0.0, u_eff = 0.0, v_eff = 0.0;
  double rounding_residual = 0.0;  // max |raw - rounded| over the integer maps
};

inline ScalingFrame make_frame(const PgfModel& model, double eps, double t_cap, double x_cap,
                               double a_cap, double u, double v) {
  if (eps <= 0.0 || t_cap <= 0.0) throw DomainError("frame: eps and t must be positive");
  const ScalingCoeffs sc = model.scaling_coeffs();
  ScalingFrame fr;
  fr.eps = eps;
  fr.t_cap = t_cap;
  fr.x_cap = x_cap;
  fr.a_cap = a_cap;
  fr.u = u;
  fr.v = v;
  const double em32 = std::pow(eps, -1.5);
  const double em1 = 1.0 / eps;
  const double em12 = std::pow(eps, -0.5);
  const double sq = std::sqrt(eps);

  const double t_raw = sc.D * em32 * t_cap;
  if (model.discrete_time()) {
    fr.t = std::nearbyint(t_raw);
    if (fr.t < 1.0) throw DomainError("frame: t rounds below 1");
    fr.t_cap_eff = fr.t / (sc.D * em32);
  } else {
    fr.t = t_raw;
    fr.t_cap_eff = t_cap;
  }
  const double n_raw = sc.E * em32 * fr.t_cap_eff - em1 * x_cap - 0.5 * em12 * a_cap + 1.0;
  fr.n = (long long)std::nearbyint(n_raw);
  if (fr.n < 1) throw DomainError("frame: n rounds below 1");
  fr.a_eff = a_cap - 2.0 * sq * (double(fr.n) - n_raw);
  const double a_raw = 2.0 * em1 * x_cap - 2.0;
  fr.a = (long long)std::nearbyint(a_raw);
  const double z_raw =
      sc.G * em32 * fr.t_cap_eff + 2.0 * em1 * x_cap + em12 * (u + fr.a_eff) - 2.0;
  fr.z = (long long)std::nearbyint(z_raw);
  fr.u_eff = u + sq * (double(fr.z) - z_raw);
  const double y_raw = em12 * v;
  fr.yprime = (long long)std::nearbyint(y_raw);
  fr.v_eff = sq * double(fr.yprime);
  fr.rounding_residual =
      std::max({std::abs(double(fr.n) - n_raw), std::abs(double(fr.z) - z_raw),
                std::abs(double(fr.yprime) - y_raw),
                model.discrete_time() ? std::abs(fr.t - t_raw) : 0.0});
  return fr;
}

// eps^{-1/2} S_{-t,-n}(y', z); converges to S_{-t,x}(v,u) under the frame.
inline double eps_S(const PgfModel& model, const ScalingFrame& fr) {
  return std::pow(fr.eps, -0.5) * S_kernel(model, fr.t, fr.n, fr.yprime, fr.z);
}

inline double eps_Sbar(const PgfModel& model, const ScalingFrame& fr) {
  return std::pow(fr.eps, -0.5) * Sbar_kernel(model, fr.t, fr.n, fr.yprime, fr.z);
}

inline double eps_Sbar_epi(const PgfModel& model, const InitialCondition& ic,
                           const ScalingFrame& fr) {
  if (ic.at(1) > -1)
    throw DomainError("eps_Sbar_epi: frame convention requires X_0(1) <= -1");
  return std::pow(fr.eps, -0.5) * Sbar_epi(model, ic, fr.t, fr.n, fr.yprime, fr.z);
}

// Limits of (A1)/(A2) at the frame's effective coordinates, via the
// reflection identity S_{t,x}(u,v) = S_{-t,x}(v,u).
inline double limit_A1(const ScalingFrame& fr) {
  return S_limit(fr.t_cap_eff, fr.x_cap, fr.u_eff, fr.v_eff);
}
inline double limit_A2(const ScalingFrame& fr) {
  return S_limit(fr.t_cap_eff, -fr.x_cap, fr.u_eff, fr.v_eff);
}

// Saddle phase f(x) = that [E log(1+x) - F log(1-x) + D log gamma(x)]; the
// acceptance suite checks f(0)=f'(0)=f''(0)=0 and f'''(0)=2 that by finite
// differences.
inline double phase_f(const PgfModel& model, double t_hat, double x) {
  if (x <= -1.0 || x >= 1.0) throw DomainError("phase_f: |x| must be < 1");
  const ScalingCoeffs sc = model.scaling_coeffs();
  const Complex g = model.eval_gamma(Complex(x, 0.0));
  if (g.real() <= 0.0)
    throw DomainError("phase_f: gamma(x) not positive on the real segment");
  return t_hat * (sc.E * std::log1p(x) - sc.F * std::log1p(-x) + sc.D * std::log(g.real()));
}

// Lower-semicontinuous piecewise-linear barrier on [0, infinity); the last
// segment's slope extends to the right.
struct PiecewiseLinear {
  std::vector<double> xs;  // strictly increasing, xs[0] == 0
  std::vector<double> ys;
  double at(double x) const {
    if (xs.empty() || xs[0] != 0.0 || xs.size() != ys.size())
      throw ConfigError("piecewise-linear barrier: need matching knots starting at 0");
    if (x <= 0.0) return ys[0];
    std::size_t i = 1;
    while (i < xs.size() && xs[i] < x) ++i;
    if (i == xs.size()) {
      if (xs.size() == 1) return ys[0];
      const double slope = (ys[i - 1] - ys[i - 2]) / (xs[i - 1] - xs[i - 2]);
      return ys[i - 1] + slope * (x - xs[i - 1]);
    }
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }
};

// Scaled barrier induced by an initial condition: the hitting condition
// RW_m > X_0(m+1) becomes B(eps m) >= g(eps m) with
// g(eps k) = sqrt(eps) (X_0(k+1) + 2k - 1), interpolated linearly.
inline PiecewiseLinear scaled_barrier(const InitialCondition& ic, double eps, double horizon) {
  PiecewiseLinear g;
  const long long K =
      std::min<long long>(ic.count(), (long long)std::ceil(horizon / eps) + 2);
  const double sq = std::sqrt(eps);
  for (long long k = 0; k < K; ++k) {
    g.xs.push_back(eps * double(k));
    g.ys.push_back(sq * double(ic.at(k + 1) + 2 * k - 1));
  }
  if (g.xs.size() == 1) {
    g.xs.push_back(eps);
    g.ys.push_back(g.ys[0] + sq);
  }
  return g;
}

struct BrownianEpiResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double hit_fraction = 0.0;
  double survivor_fraction = 0.0;  // paths alive at the horizon; crude bias scale
  std::int64_t paths = 0;
};

// Monte Carlo for S^{epi(g)}_{t,x}(v,u) = E_{B(0)=v}[ S_{t, x - tau'}(B(tau'), u) ],
// B a Brownian motion with diffusion coefficient 2 and tau' the hitting time
// of the epigraph of g. Euler stepping plus a Brownian-bridge crossing
// correction between grid points. t_cap may be negative (reflection applies).
inline BrownianEpiResult brownian_epi(const PiecewiseLinear& g, double t_cap, double x_cap,
                                      double v, double u, std::int64_t paths, std::uint64_t seed,
                                      double dt, double horizon = 4.0) {
  if (dt <= 0.0 || dt > 1e-3) throw ConfigError("brownian_epi: need 0 < dt <= 1e-3");
  if (paths < 10000) throw ConfigError("brownian_epi: need at least 1e4 paths");
  BrownianEpiResult res;
  res.paths = paths;
  if (v >= g.at(0.0)) {  // immediate hit
    res.estimate = S_limit_signed(t_cap, x_cap, v, u);
    res.hit_fraction = 1.0;
    return res;
  }
  std::vector<double> payoff(std::size_t(paths), 0.0);
  std::vector<unsigned char> hit(std::size_t(paths), 0);
  std::vector<unsigned char> alive(std::size_t(paths), 0);
  const long long steps = (long long)std::ceil(horizon / dt);
  parallel_for(0, paths, [&](std::int64_t pth) {
    auto rng = sample_stream(seed, std::uint64_t(pth));
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 * dt));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double b = v;
    for (long long s = 0; s < steps; ++s) {
      const double x0 = double(s) * dt;
      const double x1 = x0 + dt;
      const double b1 = b + gauss(rng);
      const double g0 = g.at(x0), g1 = g.at(x1);
      bool crossed = b1 >= g1;
      double tau = x1, bt = b1;
      if (!crossed) {
        // bridge upcrossing of the barrier treated as flat at its midpoint
        const double gm = 0.5 * (g0 + g1);
        const double d0 = gm - b, d1 = gm - b1;
        if (d0 > 0.0 && d1 > 0.0) {
          const double pc = std::exp(-d0 * d1 / dt);  // sigma^2 = 2
          if (unif(rng) < pc) {
            crossed = true;
            tau = x0 + 0.5 * dt;
            bt = gm;
          }
        } else if (d0 <= 0.0 || d1 <= 0.0) {
          crossed = true;
          tau = x0 + 0.5 * dt;
          bt = std::max(b, b1);
        }
      } else {
        bt = std::max(b1, g1);
        tau = x1;
      }
      if (crossed) {
        payoff[std::size_t(pth)] = S_limit_signed(t_cap, x_cap - tau, bt, u);
        hit[std::size_t(pth)] = 1;
        break;
      }
      b = b1;
    }
    if (!hit[std::size_t(pth)]) alive[std::size_t(pth)] = 1;
  });
  double sum = 0.0, sumsq = 0.0;
  std::int64_t hits = 0, survivors = 0;
  for (std::int64_t i = 0; i < paths; ++i) {
    sum += payoff[std::size_t(i)];
    sumsq += payoff[std::size_t(i)] * payoff[std::size_t(i)];
    hits += hit[std::size_t(i)];
    survivors += alive[std::size_t(i)];
  }
  const double mean = sum / double(paths);
  const double var = std::max(0.0, sumsq / double(paths) - mean * mean);
  res.estimate = mean;
  res.stderr_ = std::sqrt(var / double(paths));
  res.hit_fraction = double(hits) / double(paths);
  res.survivor_fraction = double(survivors) / double(paths);
  return res;
}

}  // namespace stasep

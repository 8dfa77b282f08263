#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "stasep/common.hpp"
#include "stasep/pgf_model.hpp"
#include "stasep/rng.hpp"

namespace stasep {

// Particle positions by label: positions[0] is the rightmost particle
// (label 1) and the vector is strictly decreasing.
using Positions = std::vector<long long>;

inline void check_weyl_chamber(const Positions& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] >= x[i - 1]) throw ConfigError("configuration is not strictly decreasing");
}

namespace sim {

inline long long draw_geometric(double alpha, std::mt19937_64& rng) {
  // support {0,1,2,...}, P(k) = (1-alpha) alpha^k
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u <= 0.0) u = unif(rng);
  return (long long)std::floor(std::log(u) / std::log(alpha));
}

inline long long draw_pmf(const std::vector<double>& pmf, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    u -= pmf[k];
    if (u <= 0.0) return (long long)k;
  }
  return (long long)pmf.size() - 1;
}

}  // namespace sim

// Sequential update, rightmost particle first: the clamp uses the already
// updated position of the particle ahead.
inline void step_bernoulli(Positions& x, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution jump(p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long long w = jump(rng) ? 1 : 0;
    x[i] = i == 0 ? x[0] + w : std::min(x[i] + w, x[i - 1] - 1);
  }
}

// Generalized sequential update with an arbitrary finite jump pmf.
inline void step_sequential_pmf(Positions& x, const std::vector<double>& pmf,
                                std::mt19937_64& rng) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long long w = sim::draw_pmf(pmf, rng);
    x[i] = i == 0 ? x[0] + w : std::min(x[i] + w, x[i - 1] - 1);
  }
}

// Parallel update: all particles draw together and the clamp uses the
// pre-update position of the particle ahead.
inline void step_geometric_parallel(Positions& x, double alpha, std::mt19937_64& rng) {
  Positions old = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long long w = sim::draw_geometric(alpha, rng);
    x[i] = i == 0 ? old[0] + w : std::min(old[i] + w, old[i - 1] - 1);
  }
}

// Event-driven continuous-time dynamics: every particle carries an
// exponential clock of rate beta; an attempt moves the particle one site
// right when that site is free. Exact in law.
inline void step_continuous(Positions& x, double beta, double duration, std::mt19937_64& rng) {
  if (beta <= 0.0) throw ConfigError("step_continuous: beta must be positive");
  if (duration < 0.0) throw ConfigError("step_continuous: negative duration");
  if (x.empty() || duration == 0.0) return;
  const double total_rate = beta * double(x.size());
  std::exponential_distribution<double> expo(total_rate);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  double clock = expo(rng);
  while (clock <= duration) {
    const std::size_t i = pick(rng);
    if (i == 0 || x[i] + 1 < x[i - 1]) x[i] += 1;
    clock += expo(rng);
  }
}

inline void step_model(Positions& x, const PgfModel& model, double t_or_duration,
                       std::mt19937_64& rng) {
  switch (model.kind()) {
    case ModelKind::DiscreteBernoulli: {
      const long long steps = (long long)std::llround(t_or_duration);
      for (long long s = 0; s < steps; ++s) step_bernoulli(x, model.p(), rng);
      break;
    }
    case ModelKind::DiscreteGeometric: {
      const long long steps = (long long)std::llround(t_or_duration);
      for (long long s = 0; s < steps; ++s) step_geometric_parallel(x, model.alpha(), rng);
      break;
    }
    case ModelKind::DiscretePmf: {
      if (model.tail_ratio() != 0.0)
        throw DomainError("simulate: geometric-tail pmf not supported by the sampler");
      const long long steps = (long long)std::llround(t_or_duration);
      for (long long s = 0; s < steps; ++s) step_sequential_pmf(x, model.pmf(), rng);
      break;
    }
    case ModelKind::ContinuousPoisson: {
      if (model.pmf().size() != 2 || model.pmf()[1] != 1.0)
        throw DomainError("simulate: only unit-jump continuous TASEP has exact dynamics here");
      step_continuous(x, model.lambda(), t_or_duration, rng);
      break;
    }
  }
}

struct TrajectoryEnsemble {
  std::string model_id;
  Positions initial;
  std::uint64_t seed = 0;
  std::vector<double> times;
  // samples[s][ti] = configuration of sample s at times[ti]
  std::vector<std::vector<Positions>> samples;
};

inline TrajectoryEnsemble run_ensemble(const PgfModel& model, const Positions& initial,
                                       const std::vector<double>& times, std::int64_t n_samples,
                                       std::uint64_t seed, bool check_order = false) {
  check_weyl_chamber(initial);
  std::vector<double> ts = times;
  std::sort(ts.begin(), ts.end());
  TrajectoryEnsemble ens;
  switch (model.kind()) {
    case ModelKind::DiscreteBernoulli: ens.model_id = "bernoulli"; break;
    case ModelKind::DiscreteGeometric: ens.model_id = "geometric"; break;
    case ModelKind::ContinuousPoisson: ens.model_id = "continuous_poisson"; break;
    case ModelKind::DiscretePmf: ens.model_id = "discrete_pmf"; break;
  }
  ens.initial = initial;
  ens.seed = seed;
  ens.times = ts;
  ens.samples.resize(std::size_t(n_samples));
  parallel_for(0, n_samples, [&](std::int64_t s) {
    auto rng = sample_stream(seed, std::uint64_t(s));
    Positions x = initial;
    double prev = 0.0;
    std::vector<Positions> snaps;
    snaps.reserve(ts.size());
    for (double t : ts) {
      step_model(x, model, model.discrete_time() ? (t - prev) : (t - prev), rng);
      if (check_order) check_weyl_chamber(x);
      snaps.push_back(x);
      prev = t;
    }
    ens.samples[std::size_t(s)] = std::move(snaps);
  });
  return ens;
}

// h_t(z) = -2 (X_t^{-1}(z-1) - ref_count) - z on an integer window.
// ref_count is X_0^{-1}(-1), equal to 1 under the paper frame.
struct HeightProfile {
  long long z0 = 0;
  std::vector<long long> values;  // h at z0, z0+1, ...
  double at(double xr) const {
    // linear interpolation between integer points
    const double fz = std::floor(xr);
    const long long zi = (long long)fz;
    if (zi < z0 || zi + 1 > z0 + (long long)values.size() - 1)
      throw DomainError("height: query outside evaluated window");
    const double frac = xr - fz;
    const double a = double(values[std::size_t(zi - z0)]);
    if (frac == 0.0) return a;
    const double b = double(values[std::size_t(zi - z0 + 1)]);
    return a + frac * (b - a);
  }
};

// X^{-1}(u): smallest label k with X(k) <= u. Positions are strictly
// decreasing, so this is the first index (0-based) with x[i] <= u, plus 1.
inline long long inverse_label(const Positions& x, long long u) {
  if (x.empty() || u < x.back())
    throw DomainError("height: window exceeds known particle range");
  auto it = std::lower_bound(x.begin(), x.end(), u,
                             [](long long pos, long long bound) { return pos > bound; });
  return (long long)(it - x.begin()) + 1;
}

inline HeightProfile height_function(const Positions& x, long long ref_count, long long z0,
                                     long long z1) {
  check_weyl_chamber(x);
  if (z1 < z0) throw ConfigError("height: empty window");
  HeightProfile prof;
  prof.z0 = z0;
  prof.values.reserve(std::size_t(z1 - z0) + 1);
  for (long long z = z0; z <= z1; ++z)
    prof.values.push_back(-2 * (inverse_label(x, z - 1) - ref_count) - z);
  return prof;
}

// hhat^eps(t,x) = sqrt(eps) [ h_t(2 eps^{-1} x) + drift eps^{-3/2} t ]
inline double scaled_height(const PgfModel& model, const HeightProfile& h, double eps,
                            double t_cap, double x_cap) {
  const double drift = model.scaling_coeffs().drift;
  const double xr = 2.0 * x_cap / eps;
  return std::sqrt(eps) * (h.at(xr) + drift * std::pow(eps, -1.5) * t_cap);
}

}  // namespace stasep

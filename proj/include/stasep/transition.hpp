#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "stasep/common.hpp"
#include "stasep/contour.hpp"
#include "stasep/pgf_model.hpp"
#include "stasep/simulator.hpp"

namespace stasep {

// Weyl chamber element, positions by label (x_1 > x_2 > ... > x_N).
struct Configuration {
  Positions positions;
  explicit Configuration(Positions p) : positions(std::move(p)) {
    check_weyl_chamber(positions);
  }
  std::size_t size() const { return positions.size(); }
  bool operator<(const Configuration& o) const { return positions < o.positions; }
  bool operator==(const Configuration& o) const { return positions == o.positions; }
};

// det[ F_{i-j}(x_{N+1-i} - y_{N+1-j}, t) ]
inline double transition_probability(const PgfModel& model, const Configuration& from,
                                     const Configuration& to, double t) {
  if (from.size() != to.size() || from.size() == 0)
    throw ConfigError("transition: configurations must have equal positive size");
  if (t < 0.0) throw DomainError("transition: t must be >= 0");
  const int N = int(from.size());
  Eigen::MatrixXd A(N, N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      A(i - 1, j - 1) =
          F_n(model, i - j, to.positions[std::size_t(N - i)] - from.positions[std::size_t(N - j)],
              t);
  const double det = A.partialPivLu().determinant();
  if (det < -1e-9)
    throw NegativeProbabilityError("transition: determinant below -1e-9 signals failure");
  return det;
}

using Distribution = std::map<Configuration, double>;

namespace detail {

inline std::vector<double> jump_pmf(const PgfModel& model, double mass_tol) {
  switch (model.kind()) {
    case ModelKind::DiscreteBernoulli:
      return {1.0 - model.p(), model.p()};
    case ModelKind::DiscretePmf:
      if (model.tail_ratio() != 0.0)
        throw DomainError("brute force: geometric-tail pmf unsupported");
      return model.pmf();
    case ModelKind::DiscreteGeometric: {
      std::vector<double> out;
      const double a = model.alpha();
      double tail = 1.0;  // P(jump >= k)
      long long k = 0;
      while (tail >= mass_tol) {
        out.push_back((1.0 - a) * std::pow(a, double(k)));
        tail *= a;
        ++k;
      }
      return out;
    }
    default:
      throw DomainError("brute force: discrete-time model required");
  }
}

}  // namespace detail

// Exact distribution after t steps by enumerating jump vectors. Moves beyond
// the exclusion clamp are lumped into the clamped branch, so blocked
// particles contribute single branches; the free rightmost particle uses the
// truncated support (geometric tail below 1e-12 dropped).
inline Distribution brute_force_distribution(const PgfModel& model, const Configuration& from,
                                             long long t, double mass_tol = 1e-12) {
  if (!model.discrete_time()) throw DomainError("brute force: continuous time has no finite path enumeration");
  if (from.size() > 4 || t > 5) throw SizeCapError("brute force: capped at N <= 4, t <= 5");
  const bool parallel = model.kind() == ModelKind::DiscreteGeometric;
  const std::vector<double> pmf = detail::jump_pmf(model, mass_tol);
  const std::size_t N = from.size();

  Distribution states;
  states.emplace(from, 1.0);
  for (long long s = 0; s < t; ++s) {
    Distribution next;
    for (const auto& [cfg, pc] : states) {
      Positions cur(N);
      std::function<void(std::size_t, double)> rec = [&](std::size_t i, double pr) {
        if (i == N) {
          next[Configuration(cur)] += pr;
          return;
        }
        if (i == 0) {
          for (std::size_t w = 0; w < pmf.size(); ++w)
            if (pmf[w] > 0.0) {
              cur[0] = cfg.positions[0] + (long long)w;
              rec(1, pr * pmf[w]);
            }
          return;
        }
        const long long lim = (parallel ? cfg.positions[i - 1] : cur[i - 1]) - 1;
        const long long gap = lim - cfg.positions[i];
        double lumped = 1.0;
        for (std::size_t w = 0; w < pmf.size() && (long long)w < gap; ++w) {
          lumped -= pmf[w];
          if (pmf[w] > 0.0) {
            cur[i] = cfg.positions[i] + (long long)w;
            rec(i + 1, pr * pmf[w]);
          }
        }
        // every draw >= gap lands on the clamp
        if (lumped > 0.0) {
          cur[i] = lim;
          rec(i + 1, pr * lumped);
        }
      };
      rec(0, pc);
    }
    states = std::move(next);
  }
  return states;
}

struct EmpiricalDistribution {
  Distribution probability;
  std::map<Configuration, double> stderr_;
  std::int64_t samples = 0;
};

inline EmpiricalDistribution mc_distribution(const PgfModel& model, const Configuration& from,
                                             double t, std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("mc: samples must be >= 1");
  std::map<Positions, std::int64_t> counts;
  const int workers = env_thread_count();
  std::vector<std::map<Positions, std::int64_t>> partial(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (samples + workers - 1) / workers;
  parallel_for(0, workers, [&](std::int64_t w) {
    auto& local = partial[std::size_t(w)];
    const std::int64_t lo = w * chunk, hi = std::min<std::int64_t>(samples, lo + chunk);
    for (std::int64_t s = lo; s < hi; ++s) {
      auto rng = sample_stream(seed, std::uint64_t(s));
      Positions x = from.positions;
      step_model(x, model, t, rng);
      local[x] += 1;
    }
  });
  for (const auto& part : partial)
    for (const auto& [pos, c] : part) counts[pos] += c;

  EmpiricalDistribution emp;
  emp.samples = samples;
  for (const auto& [pos, c] : counts) {
    const double ph = double(c) / double(samples);
    emp.probability.emplace(Configuration(pos), ph);
    emp.stderr_.emplace(Configuration(pos), std::sqrt(ph * (1.0 - ph) / double(samples)));
  }
  return emp;
}

}  // namespace stasep

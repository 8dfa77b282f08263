#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "stasep/asymptotics.hpp"
#include "stasep/contour.hpp"
#include "stasep/path_kernel.hpp"
#include "stasep/pgf_model.hpp"
#include "stasep/simulator.hpp"
#include "stasep/transition.hpp"

namespace stasep {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst observed metric
  double tolerance = 0.0;  // threshold it must stay under
  double seconds = 0.0;
  std::string detail;
};

namespace reproduce_detail {

using Clock = std::chrono::steady_clock;

inline double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline double poisson_pmf(double lam, long long k) {
  return std::exp(-lam + double(k) * std::log(lam) - std::lgamma(double(k) + 1.0));
}
inline double binom_pmf(long long n, double p, long long k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(lchoose(n, k) + double(k) * std::log(p) + double(n - k) * std::log(1.0 - p));
}
inline double negbinom_pmf(long long t, double alpha, long long k) {
  if (k < 0) return 0.0;
  return std::exp(lchoose(k + t - 1, k) + double(t) * std::log(1.0 - alpha) +
                  double(k) * std::log(alpha));
}

inline double event_sum(const Distribution& d, const std::vector<long long>& ns,
                        const std::vector<long long>& as) {
  double tot = 0.0;
  for (const auto& [cfg, pr] : d) {
    bool ok = true;
    for (std::size_t j = 0; j < ns.size(); ++j)
      if (cfg.positions[std::size_t(ns[j] - 1)] <= as[j]) {
        ok = false;
        break;
      }
    if (ok) tot += pr;
  }
  return tot;
}

}  // namespace reproduce_detail

// 1. Appendix golden derivatives for the rate-beta continuous model.
inline CriterionResult criterion_gamma_golden() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{1, "gamma derivatives golden values (continuous, rate beta)", false, 0.0,
                    1e-12, 0.0, ""};
  double worst = 0.0;
  for (double beta : {0.25, 1.0, 2.0, 5.0}) {
    auto d = PgfModel::continuous_poisson(beta).gamma_derivs();
    worst = std::max({worst, std::abs(d.g1 + beta / 2.0), std::abs(d.g2 - beta * beta / 4.0),
                      std::abs(d.g3 + beta * beta * beta / 8.0), std::abs(d.denom - beta)});
  }
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst <= r.tolerance && r.seconds < 1.0;
  r.detail = "beta in {0.25,1,2,5}";
  return r;
}

// 2. D = 2/beta, E = F = 1/2.
inline CriterionResult criterion_scaling_coeffs() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{2, "scaling coefficients D=2/beta, E=F=1/2", false, 0.0, 1e-12, 0.0, ""};
  double worst = 0.0;
  for (double beta : {0.25, 1.0, 2.0, 5.0}) {
    auto sc = PgfModel::continuous_poisson(beta).scaling_coeffs();
    worst = std::max({worst, std::abs(sc.D - 2.0 / beta), std::abs(sc.E - 0.5),
                      std::abs(sc.F - 0.5)});
  }
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst <= r.tolerance;
  return r;
}

// 3. The w^4 jump law: denom matches p(1-p)(23p-16)/(16 M(1/2)^3) and the
// sign change is bracketed at 16/23 within 1e-4.
inline CriterionResult criterion_w4_counterexample() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{3, "w^4 law: closed-form denom and 16/23 sign boundary", false, 0.0, 1e-12,
                    0.0, ""};
  auto denom_at = [](double p) {
    return PgfModel::discrete_pmf({1.0 - p, 0.0, 0.0, 0.0, p}).gamma_derivs().denom;
  };
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double p = 0.1 * i;
    const double mh = 1.0 - p + p / 16.0;
    const double closed = p * (1.0 - p) * (23.0 * p - 16.0) / (16.0 * mh * mh * mh);
    worst = std::max(worst, std::abs(denom_at(p) - closed));
  }
  // bracket the sign change on a 1e-4 grid
  bool bracketed = false;
  for (double p = 0.6950; p < 0.6965; p += 1e-4) {
    if (denom_at(p) < 0.0 && denom_at(p + 1e-4) > 0.0) {
      bracketed = std::abs(p - 16.0 / 23.0) <= 1e-4 || std::abs(p + 1e-4 - 16.0 / 23.0) <= 1e-4;
      break;
    }
  }
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst <= r.tolerance && bracketed;
  r.detail = bracketed ? "sign change bracketed at 16/23" : "sign change NOT bracketed";
  return r;
}

// 4. F_0 equals the free-particle pmf for the three built-ins.
inline CriterionResult criterion_free_particle_pmf() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{4, "F_0 equals Poisson / Binomial / NegBinomial pmf", false, 0.0, 1e-10, 0.0,
                    "t <= 5, x <= 20"};
  double worst = 0.0;
  auto poisson = PgfModel::continuous_poisson(1.0);
  for (double t : {0.7, 1.0, 2.5, 5.0})
    for (long long x = 0; x <= 20; ++x)
      worst = std::max(worst, std::abs(F_n(poisson, 0, x, t) - poisson_pmf(t, x)));
  auto bern = PgfModel::bernoulli(0.5);
  for (long long t = 1; t <= 5; ++t)
    for (long long x = 0; x <= std::min<long long>(t, 20); ++x)
      worst = std::max(worst, std::abs(F_n(bern, 0, x, double(t)) - binom_pmf(t, 0.5, x)));
  auto geom = PgfModel::geometric(0.4);
  for (long long t = 1; t <= 5; ++t)
    for (long long x = 0; x <= 20; ++x)
      worst = std::max(worst, std::abs(F_n(geom, 0, x, double(t)) - negbinom_pmf(t, 0.4, x)));
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst <= r.tolerance && r.seconds < 10.0;
  return r;
}

// 5. Determinantal transition probabilities against exhaustive enumeration.
inline CriterionResult criterion_determinant_vs_enumeration() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{5, "transition determinant equals brute-force enumeration", false, 0.0, 1e-9,
                    0.0, "N <= 3, t <= 3, all reachable targets"};
  std::vector<PgfModel> models;
  for (double p : {0.2, 0.5, 0.8}) models.push_back(PgfModel::bernoulli(p));
  models.push_back(PgfModel::discrete_pmf({0.7, 0.3}));
  models.push_back(PgfModel::discrete_pmf({0.4, 0.6}));
  const std::vector<std::vector<long long>> ics = {{0}, {0, -2}, {0, -2, -3}, {2, -1, -5}};
  double worst = 0.0;
  for (const auto& m : models)
    for (const auto& icv : ics) {
      Configuration from(icv);
      for (long long t = 1; t <= 3; ++t) {
        auto bf = brute_force_distribution(m, from, t);
        for (const auto& [to, pr] : bf)
          worst = std::max(worst,
                           std::abs(pr - transition_probability(m, from, to, double(t))));
      }
    }
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst <= r.tolerance && r.seconds < 120.0;
  return r;
}

// 6. Fredholm joint distribution against enumeration event sums.
inline CriterionResult criterion_fredholm_vs_enumeration() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{6, "Fredholm joint distribution equals enumeration", false, 0.0, 1e-7, 0.0,
                    "N = 3, t <= 3, M <= 2"};
  double worst = 0.0;
  double worst_gap = 0.0;
  bool in_range = true;
  const PgfModel models[] = {PgfModel::bernoulli(0.5), PgfModel::discrete_pmf({0.4, 0.6})};
  const std::vector<std::vector<long long>> ics = {{-1, -2, -3}, {0, -2, -5}};
  for (const auto& m : models)
    for (const auto& icv : ics) {
      InitialCondition ic(icv);
      Configuration from(icv);
      for (long long t = 1; t <= 3; ++t) {
        auto bf = brute_force_distribution(m, from, t);
        const std::vector<std::pair<std::vector<long long>, std::vector<long long>>> events = {
            {{1}, {ic.at(1) + t / 2}},
            {{2}, {ic.at(2) + 1}},
            {{3}, {ic.at(3)}},
            {{1, 2}, {ic.at(1) + 1, ic.at(2)}},
            {{1, 3}, {ic.at(1), ic.at(3) + 1}},
            {{2, 3}, {ic.at(2) + 1, ic.at(3)}}};
        for (const auto& [ns, as] : events) {
          auto res = joint_probability(m, ic, double(t), ns, as);
          worst = std::max(worst, std::abs(res.value - event_sum(bf, ns, as)));
          worst_gap = std::max(worst_gap, res.depth_gap);
          if (res.value < -1e-8 || res.value > 1.0 + 1e-8) in_range = false;
        }
      }
    }
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst <= r.tolerance && worst_gap <= 1e-8 && in_range && r.seconds < 300.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "max depth gap %.2e", worst_gap);
  r.detail = buf;
  return r;
}

// 7. Fredholm determinant against Monte Carlo at one million samples.
inline CriterionResult criterion_fredholm_vs_monte_carlo() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{7, "Fredholm joint distribution within 4 sigma of simulation", false, 0.0,
                    4.0, 0.0, "continuous beta=1, N=3, t=1, 1e6 samples"};
  auto m = PgfModel::continuous_poisson(1.0);
  const std::vector<long long> icv = {-1, -2, -3};
  InitialCondition ic(icv);
  const std::int64_t samples = 1000000;
  auto ens = run_ensemble(m, icv, {1.0}, samples, 20240809);
  const std::vector<std::pair<std::vector<long long>, std::vector<long long>>> events = {
      {{1, 3}, {0, -3}}, {{1, 2}, {-1, -2}}};
  double worst_z = 0.0;
  for (const auto& [ns, as] : events) {
    std::int64_t hits = 0;
    for (const auto& snap : ens.samples) {
      bool ok = true;
      for (std::size_t j = 0; j < ns.size(); ++j)
        if (snap[0][std::size_t(ns[j] - 1)] <= as[j]) {
          ok = false;
          break;
        }
      hits += ok;
    }
    const double phat = double(hits) / double(samples);
    const double se = std::sqrt(std::max(phat * (1.0 - phat), 1e-12) / double(samples));
    const double det = joint_probability(m, ic, 1.0, ns, as).value;
    worst_z = std::max(worst_z, std::abs(det - phat) / se);
  }
  r.measured = worst_z;
  r.seconds = elapsed(t0);
  r.pass = worst_z <= r.tolerance && r.seconds < 300.0;
  r.detail = "two observation events, z-scores";
  return r;
}

// 8. (A1)/(A2) pointwise convergence to the limit kernel.
inline CriterionResult criterion_kernel_convergence_a1_a2() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{8, "scaled kernels converge to the limit kernel (A1/A2)", false, 0.0, 0.01,
                    0.0, ""};
  const PgfModel models[] = {PgfModel::continuous_poisson(1.0), PgfModel::bernoulli(0.5),
                             PgfModel::geometric(0.4)};
  // (t, x, u, v) sample points; eps sweep fixed by the study design
  const double pts[5][4] = {{8.0, 0.0, 0.0, 0.0},
                            {9.0, 0.2, 0.3, -0.2},
                            {8.0, -0.2, 0.1, 0.4},
                            {10.0, 0.1, -0.5, 0.2},
                            {12.0, 0.0, 0.6, 0.0}};
  const double eps_list[4] = {0.1, 0.05, 0.025, 0.0125};
  double worst_final = 0.0;
  bool monotone = true;
  for (const auto& m : models)
    for (int which = 0; which < 2; ++which)
      for (const auto& pt : pts) {
        double prev = kInf;
        double err = 0.0;
        for (double eps : eps_list) {
          auto fr = make_frame(m, eps, pt[0], pt[1], 0.0, pt[2], pt[3]);
          const double val = which == 0 ? eps_S(m, fr) : eps_Sbar(m, fr);
          const double lim = which == 0 ? limit_A1(fr) : limit_A2(fr);
          err = std::abs(val - lim);
          if (err >= prev) monotone = false;
          prev = err;
        }
        worst_final = std::max(worst_final, err);
      }
  r.measured = worst_final;
  r.seconds = elapsed(t0);
  r.pass = monotone && worst_final < r.tolerance && r.seconds < 600.0;
  r.detail = monotone ? "errors strictly decreasing" : "monotonicity violated";
  return r;
}

// 9. (A3) for the wedge initial condition against the Brownian functional.
inline CriterionResult criterion_kernel_convergence_a3() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{9, "epigraph kernel vs Brownian hitting Monte Carlo (A3)", false, 0.0, 3.0,
                    0.0, "wedge initial data, eps = 0.0125"};
  auto m = PgfModel::continuous_poisson(1.0);
  const double eps = 0.0125;
  std::vector<long long> wedge;
  for (long long j = 1; j <= 1600; ++j) wedge.push_back(-j);
  InitialCondition ic(wedge);
  const double pts[3][4] = {{1.0, 0.0, 0.0, -1.6}, {1.0, 0.1, 0.3, -2.0}, {1.5, -0.1, -0.2, -2.4}};
  PiecewiseLinear g = scaled_barrier(ic, eps, 2.0);
  double worst_z = 0.0;
  std::uint64_t seed = 90210;
  for (const auto& pt : pts) {
    auto fr = make_frame(m, eps, pt[0], pt[1], 0.0, pt[2], pt[3]);
    const double lattice = eps_Sbar_epi(m, ic, fr);
    auto mc = brownian_epi(g, -fr.t_cap_eff, -fr.x_cap, fr.v_eff, fr.u_eff, 100000, seed++, 5e-4,
                           2.0);
    const double z = std::abs(lattice - mc.estimate) / std::max(mc.stderr_, 1e-300);
    if (mc.stderr_ == 0.0 && std::abs(lattice - mc.estimate) == 0.0) continue;  // exact match
    worst_z = std::max(worst_z, z);
  }
  r.measured = worst_z;
  r.seconds = elapsed(t0);
  r.pass = worst_z <= r.tolerance && r.seconds < 600.0;
  return r;
}

// 10. Airy and limit-kernel integrity.
inline CriterionResult criterion_airy_integrity() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{10, "Airy value, dual limit-kernel routes, saddle identities", false, 0.0,
                    1.0, 0.0, ""};
  // independent truncated power-series oracle for Ai(0) = 3^{-2/3}/Gamma(2/3)
  const double ai0_oracle = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  const double e_ai = std::abs(airy(0.0) - ai0_oracle);
  bool pass = e_ai <= 1e-10;
  // 125-point grid closed vs contour
  double worst_grid = 0.0;
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0})
    for (double x : {-0.6, -0.3, 0.0, 0.3, 0.6})
      for (double d : {-1.0, -0.5, 0.0, 0.5, 1.0})
        worst_grid = std::max(worst_grid,
                              std::abs(S_limit(t, x, d, 0.0) - S_limit_contour(t, x, d, 0.0)));
  pass = pass && worst_grid <= 1e-8;
  // saddle identities by finite differences of the implemented phase
  double worst_saddle = 0.0;
  for (const auto& m : {PgfModel::continuous_poisson(1.0), PgfModel::bernoulli(0.5),
                        PgfModel::geometric(0.4)}) {
    const double that = 2.0;
    auto f = [&](double x) { return phase_f(m, that, x); };
    const double h = 1e-2;
    const double d1 = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
    const double d2 = (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
    const double d3 =
        (-f(3 * h) + 8 * f(2 * h) - 13 * f(h) + 13 * f(-h) - 8 * f(-2 * h) + f(-3 * h)) /
        (8 * h * h * h);
    worst_saddle = std::max({worst_saddle, std::abs(f(0.0)) / that, std::abs(d1) / that,
                             std::abs(d2) / that, std::abs(d3 - 2.0 * that) / (2.0 * that)});
  }
  pass = pass && worst_saddle <= 1e-6;
  r.measured = std::max({e_ai / 1e-10, worst_grid / 1e-8, worst_saddle / 1e-6});
  r.seconds = elapsed(t0);
  r.pass = pass;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Ai err %.1e, grid err %.1e, saddle err %.1e", e_ai, worst_grid,
                worst_saddle);
  r.detail = buf;
  return r;
}

// 11. Numeric verification of the contour-decay inequalities.
inline CriterionResult criterion_theta_grid() {
  using namespace reproduce_detail;
  auto t0 = Clock::now();
  CriterionResult r{11, "contour-decay inequalities on the 512-point theta grid", false, 0.0,
                    -1e-3, 0.0, ""};
  double worst = -kInf;
  for (const auto& m : {PgfModel::continuous_poisson(1.0), PgfModel::bernoulli(0.5),
                        PgfModel::geometric(0.4)}) {
    auto rep = m.check_assumption_limcon(512);
    worst = std::max({worst, rep.max_lhs_condi10, rep.max_lhs_condi11});
  }
  // theta = pi golden value for the rate-1 continuous model, from the
  // closed forms E = 1/2, D = 2, |gamma(2)| = e^{-1}: (1/2) log 3 - 2
  auto m1 = PgfModel::continuous_poisson(1.0);
  auto sc = m1.scaling_coeffs();
  const double lhs_pi =
      sc.E * std::log(std::abs(2.0 - std::exp(Complex(0.0, kPi)))) +
      sc.D * std::log(std::abs(m1.eval_gamma(1.0 - std::exp(Complex(0.0, kPi)))));
  const double golden = 0.5 * std::log(3.0) - 2.0;
  const bool golden_ok = std::abs(lhs_pi - golden) <= 1e-12;
  r.measured = worst;
  r.seconds = elapsed(t0);
  r.pass = worst < r.tolerance && golden_ok;
  char buf[128];
  std::snprintf(buf, sizeof buf, "theta=pi value %.15f vs golden %.15f", lhs_pi, golden);
  r.detail = buf;
  return r;
}

inline std::vector<CriterionResult> run_acceptance_suite() {
  return {criterion_gamma_golden(),
          criterion_scaling_coeffs(),
          criterion_w4_counterexample(),
          criterion_free_particle_pmf(),
          criterion_determinant_vs_enumeration(),
          criterion_fredholm_vs_enumeration(),
          criterion_fredholm_vs_monte_carlo(),
          criterion_kernel_convergence_a1_a2(),
          criterion_kernel_convergence_a3(),
          criterion_airy_integrity(),
          criterion_theta_grid()};
}

inline int print_acceptance_report(const std::vector<CriterionResult>& results) {
  int failures = 0;
  std::printf("%-4s %-62s %-6s %12s %12s %9s\n", "id", "criterion", "status", "measured",
              "tolerance", "seconds");
  for (const auto& c : results) {
    failures += c.pass ? 0 : 1;
    std::printf("%-4d %-62s %-6s %12.3e %12.3e %9.2f  %s\n", c.id, c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.measured, c.tolerance, c.seconds, c.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failures, results.size());
  return failures;
}

}  // namespace stasep

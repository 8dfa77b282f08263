#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stasep/path_kernel.hpp"
#include "stasep/transition.hpp"

using namespace stasep;
using Catch::Approx;

namespace {

// exhaustive walk enumeration oracle for the hitting law (small horizons);
// jump law P(chi = k) = 2^{-k} truncated at negligible mass
std::map<std::pair<long long, long long>, double> enum_hitting(const InitialCondition& ic,
                                                               long long start, long long n) {
  std::map<std::pair<long long, long long>, double> law;
  const int kmax = 40;  // dropped mass 2^{-40} ~ 1e-12, below the margins used
  std::function<void(long long, long long, double)> rec = [&](long long m, long long pos,
                                                              double pr) {
    if (pos > ic.at(m + 1)) {
      law[{m, pos}] += pr;
      return;
    }
    if (m + 1 >= n) return;
    for (int k = 1; k <= kmax; ++k) rec(m + 1, pos - k, pr * std::ldexp(1.0, -k));
  };
  rec(0, start, 1.0);
  return law;
}

double event_sum(const Distribution& d, const std::vector<long long>& ns,
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

}  // namespace

TEST_CASE("Q_pow") {
  CHECK(Q_pow(1, 1, 0) == Approx(0.5).epsilon(0.0).margin(1e-15));
  CHECK(Q_pow(2, 1, 0) == 0.0);
  CHECK(Q_pow(2, 3, 0) == Approx(0.25).epsilon(0.0).margin(1e-15));
  SECTION("two-step convolution identity") {
    for (long long x = 2; x <= 40; ++x) {
      double conv = 0.0;
      for (long long mid = x - 1; mid >= 1; --mid) conv += Q_pow(1, x, mid) * Q_pow(1, mid, 0);
      CHECK(Q_pow(2, x, 0) == Approx(conv).epsilon(1e-12));
    }
  }
  SECTION("row sums are probabilities") {
    for (long long m : {1LL, 2LL, 5LL}) {
      double tot = 0.0;
      for (long long y = 60; y >= -400; --y) tot += Q_pow(m, 0, y);
      CHECK(tot == Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("hitting law") {
  InitialCondition wedge({-1, -2, -3, -4, -5, -6});
  SECTION("immediate hit") {
    auto law = rw_hitting_law(wedge, 0, 3);
    REQUIRE(law.entries.size() == 1);
    CHECK(law.entries[0].step == 0);
    CHECK(law.entries[0].position == 0);
    CHECK(law.entries[0].prob == 1.0);
  }
  SECTION("wedge cannot be hit from below") {
    auto law = rw_hitting_law(wedge, -2, 5);
    CHECK(law.entries.empty());
    CHECK(law.survival == Approx(1.0).epsilon(0.0).margin(1e-12));
    CHECK(law.lost == 0.0);
  }
  SECTION("spread initial data against exhaustive enumeration") {
    InitialCondition ic({1, -1, -4, -7, -9});
    for (long long start : {1LL, 0LL, -1LL, -3LL}) {
      for (long long n : {2LL, 3LL, 4LL, 5LL}) {
        auto law = rw_hitting_law(ic, start, n);
        auto oracle = enum_hitting(ic, start, n);
        double mass = 0.0;
        for (const auto& e : law.entries) {
          auto it = oracle.find({e.step, e.position});
          REQUIRE(it != oracle.end());
          CHECK(e.prob == Approx(it->second).epsilon(1e-12).epsilon(0.0).margin(1e-14));
          mass += e.prob;
        }
        CHECK(mass + law.survival == Approx(1.0).epsilon(0.0).margin(1e-12));
      }
    }
  }
  SECTION("horizon needs enough initial data") {
    CHECK_THROWS_AS(rw_hitting_law(InitialCondition({-1, -2}), 0, 3), DomainError);
  }
}

TEST_CASE("epigraph-stopped kernel") {
  auto m = PgfModel::continuous_poisson(1.0);
  InitialCondition ic({1, -1, -4});
  SECTION("immediate-hit collapse") {
    CHECK(Sbar_epi(m, ic, 1.0, 2, 2, 0) ==
          Approx(Sbar_kernel(m, 1.0, 2, 2, 0)).epsilon(0.0).margin(1e-14));
  }
  SECTION("horizon one vanishes below the first particle") {
    CHECK(Sbar_epi(m, ic, 1.0, 1, 0, 3) == 0.0);
  }
  SECTION("matches a direct expectation over the enumerated law") {
    InitialCondition step({-1, -2, -3});
    for (long long z1 : {-2LL, -3LL})
      for (long long z2 : {-4LL, -1LL}) {
        auto oracle = enum_hitting(step, z1, 2);
        double expect = 0.0;
        for (const auto& [key, pr] : oracle)
          expect += pr * Sbar_kernel(m, 1.0, 2 - key.first, key.second, z2);
        CHECK(Sbar_epi(m, step, 1.0, 2, z1, z2) == Approx(expect).epsilon(0.0).margin(1e-10));
      }
  }
}

TEST_CASE("kernel assembly structure") {
  auto m = PgfModel::bernoulli(0.5);
  InitialCondition ic({-1, -2, -3});
  auto km = assemble_Kt(m, ic, 2.0, {1, 2}, {0, -1}, -8);
  SECTION("no Q contribution for n_i >= n_j") {
    // diagonal blocks only carry the product part; spot-check one entry by
    // recomputing the product sum
    const long long x = -2, y = -3;
    double prod = 0.0;
    for (long long nu = km.nu_low; nu <= km.nu_high; ++nu)
      prod += S_kernel(m, 2.0, 1, nu, x) * Sbar_epi(m, ic, 2.0, 1, nu, y);
    const std::size_t r = std::size_t(x - km.L);
    const std::size_t c = std::size_t(y - km.L);
    CHECK(km.K(Eigen::Index(r), Eigen::Index(c)) == Approx(prod).epsilon(0.0).margin(1e-12));
  }
  SECTION("upper block subtracts the Q kernel") {
    const long long x = 0, y = -1;
    double prod = 0.0;
    for (long long nu = km.nu_low; nu <= km.nu_high; ++nu)
      prod += S_kernel(m, 2.0, 1, nu, x) * Sbar_epi(m, ic, 2.0, 2, nu, y);
    const std::size_t rows1 = std::size_t(0 - km.L) + 1;
    const std::size_t r = std::size_t(x - km.L);
    const std::size_t c = rows1 + std::size_t(y - km.L);
    CHECK(km.K(Eigen::Index(r), Eigen::Index(c)) ==
          Approx(prod - Q_pow(1, x, y)).epsilon(0.0).margin(1e-12));
  }
  SECTION("entries are finite") {
    CHECK(km.K.allFinite());
  }
}

TEST_CASE("joint distribution at time zero is the deterministic indicator") {
  auto m = PgfModel::bernoulli(0.5);
  InitialCondition ic({2, 0, -3});
  CHECK(joint_probability(m, ic, 0.0, {1, 2}, {1, -1}).value == Approx(1.0).epsilon(0.0).margin(1e-10));
  CHECK(joint_probability(m, ic, 0.0, {1, 2}, {2, -1}).value == Approx(0.0).epsilon(0.0).margin(1e-10));
  CHECK(joint_probability(m, ic, 0.0, {3}, {-3}).value == Approx(0.0).epsilon(0.0).margin(1e-10));
  CHECK(joint_probability(m, ic, 0.0, {3}, {-4}).value == Approx(1.0).epsilon(0.0).margin(1e-10));
}

TEST_CASE("single-particle tail identity") {
  auto m = PgfModel::bernoulli(0.5);
  InitialCondition ic({-1, -2, -3});
  // P(X_2(1) > -1) = 1 - (1-p)^2
  CHECK(joint_probability(m, ic, 2.0, {1}, {-1}).value == Approx(0.75).epsilon(0.0).margin(1e-9));
}

TEST_CASE("fredholm determinant equals enumeration event sums") {
  InitialCondition ics[] = {InitialCondition({-1, -2, -3}), InitialCondition({0, -2, -5})};
  auto m = PgfModel::bernoulli(0.5);
  for (const auto& ic : ics) {
    Configuration from(ic.positions);
    for (long long t = 1; t <= 2; ++t) {
      auto bf = brute_force_distribution(m, from, t);
      const std::vector<std::pair<std::vector<long long>, std::vector<long long>>> events = {
          {{1}, {ic.at(1)}},
          {{2}, {ic.at(2) + 1}},
          {{1, 2}, {ic.at(1) + 1, ic.at(2)}},
          {{1, 3}, {ic.at(1), ic.at(3) + 1}},
          {{2, 3}, {ic.at(2), ic.at(3)}}};
      for (const auto& [ns, as] : events) {
        auto res = joint_probability(m, ic, double(t), ns, as);
        CHECK(res.value == Approx(event_sum(bf, ns, as)).epsilon(0.0).margin(1e-7));
        CHECK(res.depth_gap < 1e-8);
      }
    }
  }
}

TEST_CASE("fredholm determinant for geometric models, including tight radius") {
  // alpha > 1/2 narrows the series radius of M, but the inverted-ratio form
  // of the bar kernel is polynomial on the contour; the determinant must
  // still reproduce enumeration
  for (double alpha : {0.4, 0.75}) {
    auto m = PgfModel::geometric(alpha);
    InitialCondition ic({0, -2, -5});
    Configuration from(ic.positions);
    auto bf = brute_force_distribution(m, from, 2);
    const std::vector<std::pair<std::vector<long long>, std::vector<long long>>> events = {
        {{1}, {1}}, {{2}, {-2}}, {{1, 3}, {0, -5}}, {{2, 3}, {-1, -4}}};
    for (const auto& [ns, as] : events) {
      auto res = joint_probability(m, ic, 2.0, ns, as);
      CHECK(res.value == Approx(event_sum(bf, ns, as)).epsilon(0.0).margin(1e-7));
    }
  }
  SECTION("bar kernel radius independence at tight radius") {
    auto m = PgfModel::geometric(0.75);
    for (long long dz = -2; dz <= 2; ++dz)
      CHECK(Sbar_kernel(m, 2.0, 2, 0, dz, 0.5) ==
            Approx(Sbar_kernel(m, 2.0, 2, 0, dz, 0.22)).epsilon(0.0).margin(1e-10));
  }
}

TEST_CASE("joint probability monotone in each threshold") {
  auto m = PgfModel::geometric(0.4);
  InitialCondition ic({-1, -2, -3});
  double prev = 1.1;
  for (long long a = -3; a <= 3; ++a) {
    const double v = joint_probability(m, ic, 2.0, {1}, {a}).value;
    CHECK(v <= prev + 1e-9);
    CHECK(v >= -1e-8);
    CHECK(v <= 1.0 + 1e-8);
    prev = v;
  }
}

TEST_CASE("projection identities far from the bulk") {
  auto m = PgfModel::bernoulli(0.3);
  InitialCondition ic({-1, -2, -3});
  CHECK(joint_probability(m, ic, 2.0, {1, 2}, {-20, -21}).value == Approx(1.0).epsilon(0.0).margin(1e-8));
  CHECK(joint_probability(m, ic, 2.0, {1}, {10}).value == Approx(0.0).epsilon(0.0).margin(1e-8));
}

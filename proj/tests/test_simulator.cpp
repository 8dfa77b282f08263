#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stasep/contour.hpp"
#include "stasep/simulator.hpp"

using namespace stasep;
using Catch::Approx;

TEST_CASE("single steps") {
  SECTION("bernoulli blocking clamps to the updated predecessor") {
    Positions x{0, -1};
    // force both to jump by driving the rng until it happens
    for (std::uint64_t s = 0; s < 64; ++s) {
      Positions y{0, -1};
      auto rng = sample_stream(1, s);
      step_bernoulli(y, 0.5, rng);
      check_weyl_chamber(y);
      if (y[0] == 1) CHECK(y[1] <= 0);
    }
    (void)x;
  }
  SECTION("geometric parallel clamps to the old predecessor") {
    for (std::uint64_t s = 0; s < 256; ++s) {
      Positions y{0, -1};
      auto rng = sample_stream(2, s);
      step_geometric_parallel(y, 0.6, rng);
      check_weyl_chamber(y);
      CHECK(y[1] <= -1);  // old clamp: the trailing particle can never pass -1
    }
  }
  SECTION("zero duration is the identity") {
    Positions y{3, 1, -2};
    auto rng = sample_stream(3, 0);
    step_continuous(y, 1.0, 0.0, rng);
    CHECK(y == Positions{3, 1, -2});
  }
}

TEST_CASE("free-particle marginals match F_0") {
  const std::int64_t n = 150000;
  struct Case {
    PgfModel model;
    double t;
  };
  const Case cases[] = {{PgfModel::continuous_poisson(1.0), 1.0},
                        {PgfModel::bernoulli(0.5), 3.0},
                        {PgfModel::geometric(0.4), 2.0}};
  for (const auto& c : cases) {
    auto ens = run_ensemble(c.model, {0}, {c.t}, n, 99);
    std::map<long long, double> freq;
    for (const auto& s : ens.samples) freq[s[0][0]] += 1.0 / double(n);
    for (const auto& [x, p] : freq) {
      if (p * n < 25) continue;  // skip cells with too few counts for a z-test
      const double truth = F_n(c.model, 0, x, c.t);
      const double se = std::sqrt(truth * (1.0 - truth) / double(n));
      CHECK(std::abs(p - truth) <= 4.0 * se);
    }
  }
}

TEST_CASE("leading particle is unaffected by the one behind") {
  const std::int64_t n = 120000;
  auto m = PgfModel::continuous_poisson(1.0);
  auto pair = run_ensemble(m, {1, 0}, {1.0}, n, 5);
  std::map<long long, double> freq;
  for (const auto& s : pair.samples) freq[s[0][0]] += 1.0 / double(n);
  for (const auto& [x, p] : freq) {
    if (p * n < 25) continue;
    const double truth = F_n(m, 0, x - 1, 1.0);
    const double se = std::sqrt(truth * (1.0 - truth) / double(n));
    CHECK(std::abs(p - truth) <= 4.0 * se);
  }
}

TEST_CASE("ensembles preserve order and are seed deterministic") {
  auto m = PgfModel::geometric(0.5);
  auto a = run_ensemble(m, {0, -2, -4}, {1.0, 3.0}, 500, 17, /*check_order=*/true);
  auto b = run_ensemble(m, {0, -2, -4}, {1.0, 3.0}, 500, 17);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("height function") {
  // frame convention: particle 1 is the rightmost in Z_{<0}
  Positions x0{-1, -2, -3, -4, -5, -6, -7, -8};
  auto h0 = height_function(x0, 1, -7, 4);
  SECTION("h_0(0) = 0 under the frame") { CHECK(h0.at(0.0) == 0.0); }
  SECTION("steps are +-1") {
    for (std::size_t i = 0; i + 1 < h0.values.size(); ++i) {
      const long long d = h0.values[i + 1] - h0.values[i];
      CHECK((d == 1 || d == -1));
    }
  }
  SECTION("fully packed region has slope +1 leftward of the front") {
    for (long long z = -7; z <= -1; ++z)
      CHECK(h0.at(double(z)) == Approx(double(-std::llabs(z))).epsilon(0.0).margin(0.0));
  }
  SECTION("window guard") {
    CHECK_THROWS_AS(height_function(x0, 1, -9, 0), DomainError);
  }
  SECTION("height-position duality on simulated paths") {
    // pathwise event equality: {h_t(z) <= s} = {X_t(m) >= z} with
    // m = (-s - z)/2 whenever that is an integer label
    auto m = PgfModel::bernoulli(0.5);
    auto ens = run_ensemble(m, x0, {2.0}, 200, 23);
    for (const auto& smp : ens.samples) {
      const auto& xt = smp[0];
      auto h = height_function(xt, 1, xt.back() + 1, 6);
      for (long long z = xt.back() + 1; z <= 4; ++z)
        for (long long s = -z - 2 * (long long)xt.size() + 2; s <= -z; s += 2) {
          const long long label = (-s - z) / 2;
          if (label < 1 || label > (long long)xt.size()) continue;
          const bool lhs = h.at(double(z)) <= double(s);
          const bool rhs = xt[std::size_t(label - 1)] >= z;
          CHECK(lhs == rhs);
        }
    }
  }
}

TEST_CASE("scaled height") {
  auto m = PgfModel::continuous_poisson(1.0);
  Positions wedge;
  for (long long j = 1; j <= 400; ++j) wedge.push_back(-j);
  const double eps = 0.01;
  auto h0 = height_function(wedge, 1, -399, 300);
  SECTION("time zero drops the drift term") {
    const double x_cap = 0.5;
    const double direct = std::sqrt(eps) * h0.at(2.0 * x_cap / eps);
    CHECK(scaled_height(m, h0, eps, 0.0, x_cap) == Approx(direct).epsilon(0.0).margin(1e-12));
  }
  SECTION("wedge profile scales to -2|x|/sqrt(eps) shape") {
    for (double x_cap : {-0.4, 0.3, 0.9}) {
      const double v = scaled_height(m, h0, eps, 0.0, x_cap);
      CHECK(v == Approx(-2.0 * std::abs(x_cap) / std::sqrt(eps)).epsilon(0.0).margin(2.0 * std::sqrt(eps)));
    }
  }
  SECTION("drift coefficient for the rate-1 model is 1") {
    CHECK(m.scaling_coeffs().drift == Approx(1.0).epsilon(0.0).margin(1e-12));
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stasep/transition.hpp"

using namespace stasep;
using Catch::Approx;

TEST_CASE("single particle transitions") {
  auto m = PgfModel::continuous_poisson(1.0);
  Configuration y({0});
  CHECK(transition_probability(m, y, Configuration({1}), 1.0) ==
        Approx(std::exp(-1.0)).epsilon(0.0).margin(1e-11));
  CHECK(transition_probability(m, y, y, 0.0) == Approx(1.0).epsilon(0.0).margin(1e-12));
  CHECK(transition_probability(m, y, Configuration({3}), 0.0) == Approx(0.0).epsilon(0.0).margin(1e-12));
}

TEST_CASE("two-particle bernoulli blocking case") {
  auto m = PgfModel::bernoulli(0.5);
  Configuration from({0, -1});
  CHECK(transition_probability(m, from, Configuration({1, 0}), 1.0) ==
        Approx(0.25).epsilon(0.0).margin(1e-12));
}

TEST_CASE("brute force basics") {
  auto m = PgfModel::bernoulli(0.3);
  SECTION("single particle single step") {
    auto d = brute_force_distribution(m, Configuration({5}), 1);
    CHECK(d.at(Configuration({5})) == Approx(0.7).epsilon(0.0).margin(1e-15));
    CHECK(d.at(Configuration({6})) == Approx(0.3).epsilon(0.0).margin(1e-15));
  }
  SECTION("time zero is a point mass") {
    auto d = brute_force_distribution(m, Configuration({2, 0}), 0);
    REQUIRE(d.size() == 1);
    CHECK(d.at(Configuration({2, 0})) == Approx(1.0));
  }
  SECTION("two adjacent particles with blocking") {
    // blocked draws fold into staying put: (0,-1) collects (1-p)^2 + (1-p)p
    auto d = brute_force_distribution(PgfModel::bernoulli(0.5), Configuration({0, -1}), 1);
    CHECK(d.at(Configuration({0, -1})) == Approx(0.5).epsilon(0.0).margin(1e-15));
    CHECK(d.at(Configuration({1, -1})) == Approx(0.25).epsilon(0.0).margin(1e-15));
    CHECK(d.at(Configuration({1, 0})) == Approx(0.25).epsilon(0.0).margin(1e-15));
  }
  SECTION("size caps") {
    CHECK_THROWS_AS(brute_force_distribution(m, Configuration({0, -1, -2, -3, -4}), 1),
                    SizeCapError);
    CHECK_THROWS_AS(brute_force_distribution(m, Configuration({0}), 6), SizeCapError);
  }
  SECTION("mass conservation") {
    auto d = brute_force_distribution(PgfModel::geometric(0.4), Configuration({1, -1, -4}), 3);
    double tot = 0.0;
    for (auto& [c, p] : d) tot += p;
    CHECK(tot == Approx(1.0).epsilon(0.0).margin(1e-10));
  }
}

TEST_CASE("determinant equals enumeration across models and horizons") {
  const Configuration ics[] = {Configuration({0, -2, -3}), Configuration({2, -1, -5})};
  std::vector<PgfModel> models;
  for (double p : {0.2, 0.5, 0.8}) models.push_back(PgfModel::bernoulli(p));
  models.push_back(PgfModel::geometric(0.4));
  models.push_back(PgfModel::discrete_pmf({0.6, 0.4}));
  for (const auto& m : models)
    for (const auto& from : ics)
      for (long long t = 1; t <= 3; ++t) {
        auto bf = brute_force_distribution(m, from, t);
        double worst = 0.0;
        for (const auto& [to, pr] : bf)
          worst = std::max(worst, std::abs(pr - transition_probability(m, from, to, double(t))));
        CHECK(worst < 1e-9);
      }
}

TEST_CASE("row normalization over the reachable set") {
  auto m = PgfModel::bernoulli(0.55);
  Configuration from({0, -2, -3});
  auto bf = brute_force_distribution(m, from, 3);
  double tot = 0.0;
  for (const auto& [to, pr] : bf) {
    (void)pr;
    tot += transition_probability(m, from, to, 3.0);
  }
  CHECK(tot == Approx(1.0).epsilon(0.0).margin(1e-8));
}

TEST_CASE("monte carlo endpoint distribution") {
  auto m = PgfModel::continuous_poisson(1.0);
  SECTION("determinism") {
    auto a = mc_distribution(m, Configuration({0}), 1.0, 2000, 7);
    auto b = mc_distribution(m, Configuration({0}), 1.0, 2000, 7);
    REQUIRE(a.probability.size() == b.probability.size());
    for (auto& [c, p] : a.probability) CHECK(b.probability.at(c) == p);
  }
  SECTION("single trajectory") {
    auto a = mc_distribution(m, Configuration({0}), 1.0, 1, 3);
    REQUIRE(a.probability.size() == 1);
    CHECK(a.probability.begin()->second == 1.0);
  }
  SECTION("free particle mean displacement") {
    const std::int64_t n = 200000;
    auto a = mc_distribution(m, Configuration({0}), 1.0, n, 11);
    double mean = 0.0;
    for (auto& [c, p] : a.probability) mean += double(c.positions[0]) * p;
    CHECK(std::abs(mean - 1.0) < 4.0 / std::sqrt(double(n)));
  }
  SECTION("matches the determinant within four sigma") {
    auto bf_model = PgfModel::bernoulli(0.5);
    Configuration from({0, -1});
    auto emp = mc_distribution(bf_model, from, 2.0, 100000, 5);
    for (auto& [to, p] : emp.probability) {
      const double det = transition_probability(bf_model, from, to, 2.0);
      const double se = emp.stderr_.at(to);
      CHECK(std::abs(det - p) <= 4.0 * se + 1e-9);
    }
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stasep/asymptotics.hpp"

using namespace stasep;
using Catch::Approx;

TEST_CASE("airy function") {
  CHECK(airy(0.0) == Approx(0.3550280538878172).epsilon(0.0).margin(1e-12));
  SECTION("series vs contour cross-check inside the overlap") {
    for (double z : {-7.5, -4.0, -1.0, 0.0, 1.0, 2.5, 6.0, 7.9})
      CHECK(airy_series(z) == Approx(airy_contour(z)).epsilon(0.0).margin(1e-9));
  }
  SECTION("reference values") {
    // Ai via scipy, 16 digits
    CHECK(airy(1.0) == Approx(0.135292416312881416).epsilon(0.0).margin(1e-10));
    CHECK(airy(-1.0) == Approx(0.535560883292352119).epsilon(0.0).margin(1e-10));
    CHECK(airy(5.0) == Approx(1.08344428136074417e-4).epsilon(0.0).margin(1e-12));
    CHECK(airy(10.0) == Approx(1.10475325528986859e-10).epsilon(0.0).margin(1e-14));
    CHECK(airy(-10.0) == Approx(0.0402412384864431907).epsilon(0.0).margin(1e-10));
    CHECK(airy(-25.0) == Approx(0.163526578830429469).epsilon(0.0).margin(1e-10));
    CHECK(airy(25.0) == Approx(8.11602682469138668e-38).epsilon(0.0).margin(1e-45));
  }
  SECTION("decay on the positive axis") {
    double prev = airy(2.0);
    for (double z = 2.5; z <= 30.0; z += 0.5) {
      const double v = airy(z);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
  SECTION("range guard") { CHECK_THROWS_AS(airy(31.0), DomainError); }
}

TEST_CASE("limit kernel") {
  SECTION("reduces to airy at the origin") {
    CHECK(S_limit(1.0, 0.0, 0.7, 0.7) == Approx(0.3550280538878172).epsilon(0.0).margin(1e-10));
  }
  SECTION("depends on v-u only when x is fixed") {
    CHECK(S_limit(1.0, 0.0, 1.0, 1.0) == Approx(S_limit(1.0, 0.0, 0.0, 0.0)).epsilon(0.0).margin(1e-14));
    CHECK(S_limit(2.0, 0.4, 1.3, 0.3) == Approx(S_limit(2.0, 0.4, 1.0, 0.0)).epsilon(0.0).margin(1e-14));
  }
  SECTION("closed form vs contour form on a grid") {
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0})
      for (double x : {-0.6, -0.3, 0.0, 0.3, 0.6})
        for (double d : {-1.0, -0.5, 0.0, 0.5, 1.0})
          CHECK(S_limit(t, x, d, 0.0) == Approx(S_limit_contour(t, x, d, 0.0)).epsilon(0.0).margin(1e-8));
  }
  SECTION("spot value") {
    const double v = 0.316467281056048006;  // e^{1/12} Ai(1/4)
    CHECK(S_limit(1.0, 0.5, 0.3, 0.3) == Approx(v).epsilon(0.0).margin(1e-10));
  }
}

TEST_CASE("saddle phase identities") {
  for (auto& m : {PgfModel::continuous_poisson(1.0), PgfModel::bernoulli(0.5),
                  PgfModel::geometric(0.4)}) {
    const double t_hat = 3.7;
    auto f = [&](double x) { return phase_f(m, t_hat, x); };
    const double h = 1e-2;
    const double f0 = f(0.0);
    const double d1 = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
    const double d2 = (-f(2 * h) + 16 * f(h) - 30 * f0 + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
    const double d3 =
        (-f(3 * h) + 8 * f(2 * h) - 13 * f(h) + 13 * f(-h) - 8 * f(-2 * h) + f(-3 * h)) /
        (8 * h * h * h);
    CHECK(std::abs(f0) < 1e-12 * t_hat);
    CHECK(std::abs(d1) < 1e-6 * t_hat);
    CHECK(std::abs(d2) < 1e-6 * t_hat);
    CHECK(d3 == Approx(2.0 * t_hat).epsilon(1e-6));
  }
}

TEST_CASE("scaling frame") {
  auto m = PgfModel::continuous_poisson(1.0);
  SECTION("continuous time stays real") {
    auto fr = make_frame(m, 0.1, 1.0, 0.0, 0.0, 0.0, 0.0);
    CHECK(fr.t == Approx(2.0 * std::pow(0.1, -1.5)).epsilon(1e-14));
    CHECK(fr.t_cap_eff == 1.0);
    CHECK(fr.n >= 1);
  }
  SECTION("discrete time rounds to an integer and reports the effective t") {
    auto b = PgfModel::bernoulli(0.5);
    auto fr = make_frame(b, 0.1, 1.0, 0.0, 0.0, 0.0, 0.0);
    CHECK(fr.t == std::nearbyint(fr.t));
    const double sc_D = b.scaling_coeffs().D;
    CHECK(fr.t_cap_eff == Approx(fr.t / (sc_D * std::pow(0.1, -1.5))).epsilon(1e-14));
  }
  SECTION("degenerate frames are rejected") {
    // discrete-time t rounds to zero at large eps and tiny t
    CHECK_THROWS_AS(make_frame(PgfModel::bernoulli(0.5), 2.0, 0.01, 0.0, 0.0, 0.0, 0.0),
                    DomainError);
    // n driven below 1 by a large positive x
    CHECK_THROWS_AS(make_frame(m, 0.25, 0.05, 2.0, 0.0, 0.0, 0.0), DomainError);
  }
  SECTION("effective coordinates reproduce the integer lattice values") {
    auto fr = make_frame(m, 0.05, 1.0, 0.2, 0.0, 0.3, -0.4);
    const auto sc = m.scaling_coeffs();
    const double em32 = std::pow(0.05, -1.5), em1 = 20.0, em12 = std::sqrt(20.0);
    CHECK(sc.E * em32 * fr.t_cap_eff - em1 * 0.2 - 0.5 * em12 * fr.a_eff + 1.0 ==
          Approx(double(fr.n)).epsilon(0.0).margin(1e-9));
    CHECK(sc.G * em32 * fr.t_cap_eff + 2.0 * em1 * 0.2 + em12 * (fr.u_eff + fr.a_eff) - 2.0 ==
          Approx(double(fr.z)).epsilon(0.0).margin(1e-9));
  }
}

TEST_CASE("scaled kernels approach the limit kernel") {
  // one representative point per side; the full three-model five-point sweep
  // lives in the acceptance suite
  auto m = PgfModel::continuous_poisson(1.0);
  const double eps[3] = {0.1, 0.05, 0.025};
  double prev_err1 = 1e9, prev_err2 = 1e9;
  for (double e : eps) {
    auto fr = make_frame(m, e, 8.0, 0.0, 0.0, 0.0, 0.0);
    const double err1 = std::abs(eps_S(m, fr) - limit_A1(fr));
    const double err2 = std::abs(eps_Sbar(m, fr) - limit_A2(fr));
    CHECK(err1 < prev_err1);
    CHECK(err2 < prev_err2);
    prev_err1 = err1;
    prev_err2 = err2;
  }
  CHECK(prev_err1 < 0.02);
  CHECK(prev_err2 < 0.02);
}

TEST_CASE("epigraph-stopped scaled kernel") {
  auto m = PgfModel::continuous_poisson(1.0);
  std::vector<long long> wedge;
  for (long long j = 1; j <= 500; ++j) wedge.push_back(-j);
  InitialCondition ic(wedge);
  SECTION("immediate-hit regime reduces to the plain kernel") {
    auto fr = make_frame(m, 0.1, 1.0, 0.0, 0.0, 0.0, 0.5);
    REQUIRE(fr.yprime >= 0);  // above X_0(1) = -1
    CHECK(eps_Sbar_epi(m, ic, fr) == Approx(eps_Sbar(m, fr)).epsilon(0.0).margin(1e-13));
  }
  SECTION("below the wedge the kernel vanishes identically") {
    auto fr = make_frame(m, 0.1, 1.0, 0.0, 0.0, 0.0, -0.8);
    REQUIRE(fr.yprime <= -1);
    CHECK(eps_Sbar_epi(m, ic, fr) == 0.0);
  }
  SECTION("frame convention is enforced") {
    InitialCondition bad({3, 1, 0, -1});
    auto fr = make_frame(m, 0.1, 1.0, 0.0, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS(eps_Sbar_epi(m, bad, fr), DomainError);
  }
}

TEST_CASE("brownian epigraph functional") {
  SECTION("immediate hit is exact with zero spread") {
    PiecewiseLinear g{{0.0}, {0.0}};
    auto r = brownian_epi(g, 1.0, 0.2, 0.5, 0.1, 20000, 42, 5e-4);
    CHECK(r.estimate == Approx(S_limit(1.0, 0.2, 0.5, 0.1)).epsilon(0.0).margin(1e-14));
    CHECK(r.stderr_ == 0.0);
  }
  SECTION("distant barrier gives a vanishing estimate") {
    PiecewiseLinear g{{0.0, 1.0}, {40.0, 80.0}};
    auto r = brownian_epi(g, 1.0, 0.0, 0.0, 0.0, 20000, 42, 5e-4, 2.0);
    CHECK(r.hit_fraction == 0.0);
    CHECK(r.estimate == 0.0);
  }
  SECTION("flat barrier against the first-passage quadrature oracle") {
    // barrier at level b from below: first passage density of BM with
    // diffusion 2 is (b-v)/sqrt(4 pi s^3) exp(-(b-v)^2/(4 s))
    const double b = 0.6, v = -0.4, tcap = 1.5, xcap = 0.3, u = 0.2;
    PiecewiseLinear g{{0.0}, {b}};
    const double gap = b - v;
    auto integrand = [&](double s) {
      return gap / std::sqrt(4.0 * kPi * s * s * s) * std::exp(-gap * gap / (4.0 * s)) *
             S_limit_signed(tcap, xcap - s, b, u);
    };
    double oracle = 0.0;
    const int NP = 4000;
    const double smax = 40.0;
    for (int i = 0; i < NP; ++i) {
      // geometric-ish grid refined near 0
      const double a0 = smax * std::pow(double(i) / NP, 3.0);
      const double a1 = smax * std::pow(double(i + 1) / NP, 3.0);
      const double mid = 0.5 * (a0 + a1);
      if (mid > 0.0) oracle += integrand(mid) * (a1 - a0);
    }
    auto r = brownian_epi(g, tcap, xcap, v, u, 100000, 1234, 5e-4, 4.0);
    INFO("oracle " << oracle << " mc " << r.estimate << " +- " << r.stderr_);
    CHECK(std::abs(r.estimate - oracle) <= 3.0 * r.stderr_ + 2e-3);
  }
  SECTION("deterministic given the seed") {
    PiecewiseLinear g{{0.0}, {0.5}};
    auto a = brownian_epi(g, 1.0, 0.0, -0.5, 0.0, 20000, 9, 1e-3, 2.0);
    auto c = brownian_epi(g, 1.0, 0.0, -0.5, 0.0, 20000, 9, 1e-3, 2.0);
    CHECK(a.estimate == c.estimate);
    CHECK(a.stderr_ == c.stderr_);
  }
}

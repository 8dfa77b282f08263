#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stasep/common.hpp"

namespace stasep {

enum class ModelKind { ContinuousPoisson, DiscreteBernoulli, DiscreteGeometric, DiscretePmf };
enum class TimeKind { Discrete, Continuous };

// gamma(w) = M((1-w)/2) / M(1/2) derivatives at 0, plus the combination that
// gates the KPZ scaling (Assumption condition: denom > 0).
struct GammaDerivs {
  double g1 = 0.0;  // gamma'(0)
  double g2 = 0.0;  // gamma''(0)
  double g3 = 0.0;  // gamma'''(0)
  double denom = 0.0;  // g3 - 3 g2 g1 + 2 g1^3 - 2 g1
};

struct ScalingCoeffs {
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
  double drift = 0.0;  // coefficient of eps^{-3/2} t in the scaled height
};

struct AssumptionReport {
  bool pass = false;
  double denom = 0.0;
};

struct ThetaGridReport {
  double max_lhs_condi10 = -kInf;
  double max_lhs_condi11 = -kInf;
  double argmax_condi10 = 0.0;
  double argmax_condi11 = 0.0;
  bool pass = false;
  bool domain_failure = false;
  double failure_theta = 0.0;
  std::string note;
};

// Probability generating function of the rightmost particle's free jump law.
// Discrete-time kinds give M(w) = G_Y(w); the continuous kind is compound
// Poisson, M(w) = exp(lambda (G_Z(w) - 1)), plain rate-beta TASEP being Z == 1.
class PgfModel {
 public:
  static PgfModel bernoulli(double p) {
    require(p > 0.0 && p < 1.0, "bernoulli: p must lie in (0,1)");
    PgfModel m;
    m.kind_ = ModelKind::DiscreteBernoulli;
    m.time_ = TimeKind::Discrete;
    m.p_ = p;
    m.radius_ = kInf;
    return m;
  }

  static PgfModel geometric(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "geometric: alpha must lie in (0,1)");
    PgfModel m;
    m.kind_ = ModelKind::DiscreteGeometric;
    m.time_ = TimeKind::Discrete;
    m.alpha_ = alpha;
    m.radius_ = 1.0 / alpha;
    return m;
  }

  static PgfModel continuous_poisson(double beta) {
    require(beta > 0.0, "continuous_poisson: beta must be positive");
    return compound_poisson(beta, {0.0, 1.0});
  }

  static PgfModel compound_poisson(double lambda, std::vector<double> z_pmf) {
    require(lambda > 0.0, "compound_poisson: lambda must be positive");
    validate_pmf(z_pmf);
    PgfModel m;
    m.kind_ = ModelKind::ContinuousPoisson;
    m.time_ = TimeKind::Continuous;
    m.lambda_ = lambda;
    m.pmf_ = std::move(z_pmf);
    m.radius_ = kInf;
    return m;
  }

  static PgfModel discrete_pmf(std::vector<double> pmf, double tail_ratio = 0.0) {
    PgfModel m;
    m.kind_ = ModelKind::DiscretePmf;
    m.time_ = TimeKind::Discrete;
    m.tail_ratio_ = tail_ratio;
    if (tail_ratio == 0.0) {
      validate_pmf(pmf);
      m.radius_ = kInf;
    } else {
      require(tail_ratio > 0.0 && tail_ratio < 1.0, "discrete_pmf: tail ratio must lie in (0,1)");
      require(!pmf.empty(), "discrete_pmf: empty pmf");
      double total = 0.0;
      for (double c : pmf) {
        require(c >= -1e-15, "discrete_pmf: negative mass");
        total += c;
      }
      // entries beyond the last one continue geometrically: a_{K+j} = a_K r^j
      total += pmf.back() * tail_ratio / (1.0 - tail_ratio);
      require(std::abs(total - 1.0) <= 1e-12, "discrete_pmf: mass does not sum to 1");
      m.radius_ = 1.0 / tail_ratio;
    }
    m.pmf_ = std::move(pmf);
    return m;
  }

  ModelKind kind() const { return kind_; }
  TimeKind time_kind() const { return time_; }
  bool discrete_time() const { return time_ == TimeKind::Discrete; }
  double radius() const { return radius_; }
  double p() const { return p_; }
  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  double tail_ratio() const { return tail_ratio_; }
  const std::vector<double>& pmf() const { return pmf_; }

  // M(w)
  Complex eval(Complex w) const {
    if (std::abs(w) >= radius_)
      throw DomainError("eval_M: |w| >= radius of convergence");
    return eval_unchecked(w);
  }

  Complex eval_unchecked(Complex w) const {
    switch (kind_) {
      case ModelKind::DiscreteBernoulli:
        return 1.0 + p_ * (w - 1.0);
      case ModelKind::DiscreteGeometric:
        return (1.0 - alpha_) / (1.0 - alpha_ * w);
      case ModelKind::ContinuousPoisson:
        return std::exp(lambda_ * (eval_poly(pmf_, w) - 1.0));
      case ModelKind::DiscretePmf: {
        Complex v = eval_poly(pmf_, w);
        if (tail_ratio_ > 0.0) {
          // the finite list covers 0..K-1 plus the geometric continuation of a_K
          const std::size_t K = pmf_.size() - 1;
          v += pmf_.back() * pow_int(w, (long long)K) * (tail_ratio_ * w) /
               (1.0 - tail_ratio_ * w) ;
        }
        return v;
      }
    }
    return {};
  }

  // M(w)^t, branch-safe: compound Poisson uses the exponent form, discrete
  // kinds use exact integer powers (t must be a nonnegative integer there).
  Complex eval_pow_t(Complex w, double t) const {
    if (kind_ == ModelKind::ContinuousPoisson)
      return std::exp(lambda_ * t * (eval_poly(pmf_, w) - 1.0));
    long long ti = (long long)std::llround(t);
    if (ti < 0 || std::abs(t - double(ti)) > 1e-9)
      throw DomainError("discrete-time model requires integer t >= 0");
    return pow_int(eval_unchecked(w), ti);
  }

  // (M(w)/M(c))^t with the ratio formed first; keeps |.|^t near 1 on saddle
  // contours where the separate factors would overflow or underflow.
  Complex eval_ratio_pow_t(Complex w, Complex c, double t) const {
    if (kind_ == ModelKind::ContinuousPoisson)
      return std::exp(lambda_ * t * (eval_poly(pmf_, w) - eval_poly(pmf_, c)));
    long long ti = (long long)std::llround(t);
    if (ti < 0 || std::abs(t - double(ti)) > 1e-9)
      throw DomainError("discrete-time model requires integer t >= 0");
    return pow_int(eval_unchecked(w) / eval_unchecked(c), ti);
  }

  // gamma(w) = M((1-w)/2) / M(1/2); gamma(0) == 1 exactly.
  Complex eval_gamma(Complex w) const {
    if (std::abs(1.0 - w) >= 2.0 * radius_)
      throw DomainError("eval_gamma: |1-w| >= 2 radius");
    return eval_unchecked(0.5 * (1.0 - w)) / eval_unchecked(Complex(0.5, 0.0));
  }

  GammaDerivs gamma_derivs() const {
    GammaDerivs d;
    switch (kind_) {
      case ModelKind::DiscreteBernoulli: {
        const double q = p_ / (2.0 - p_);  // gamma(w) = 1 - q w
        d.g1 = -q;
        d.g2 = 0.0;
        d.g3 = 0.0;
        break;
      }
      case ModelKind::DiscreteGeometric: {
        const double c = alpha_ / (2.0 - alpha_);  // gamma(w) = 1/(1 + c w)
        d.g1 = -c;
        d.g2 = 2.0 * c * c;
        d.g3 = -6.0 * c * c * c;
        break;
      }
      case ModelKind::ContinuousPoisson: {
        // chain rule through G_Z((1-w)/2): mu_k = lambda (-1/2)^k G_Z^(k)(1/2)
        const double m1 = lambda_ * (-0.5) * poly_deriv_at_half(pmf_, 1);
        const double m2 = lambda_ * 0.25 * poly_deriv_at_half(pmf_, 2);
        const double m3 = lambda_ * (-0.125) * poly_deriv_at_half(pmf_, 3);
        d.g1 = m1;
        d.g2 = m2 + m1 * m1;
        d.g3 = m3 + 3.0 * m1 * m2 + m1 * m1 * m1;
        break;
      }
      case ModelKind::DiscretePmf: {
        // exact factorial-moment sums: gamma^(n)(0) = (-1)^n E[Y^(n) (1/2)^Y] / M(1/2)
        const double mh = factorial_moment_half(0);
        d.g1 = -factorial_moment_half(1) / mh;
        d.g2 = factorial_moment_half(2) / mh;
        d.g3 = -factorial_moment_half(3) / mh;
        break;
      }
    }
    d.denom = d.g3 - 3.0 * d.g2 * d.g1 + 2.0 * d.g1 * d.g1 * d.g1 - 2.0 * d.g1;
    return d;
  }

  AssumptionReport check_assumption_imas() const {
    const GammaDerivs d = gamma_derivs();
    const double scale =
        std::max({1.0, std::abs(d.g3), 3.0 * std::abs(d.g2 * d.g1),
                  2.0 * std::abs(d.g1 * d.g1 * d.g1), 2.0 * std::abs(d.g1)});
    return {d.denom > 1e-12 * scale, d.denom};
  }

  // Grid check of the two contour-decay inequalities over
  // theta in [-pi,-pi/3) U (pi/3, pi]; open at +-pi/3, closed at +-pi.
  ThetaGridReport check_assumption_limcon(int grid_size) const {
    if (grid_size < 64) throw DomainError("limcon: grid_size must be >= 64");
    const AssumptionReport imas = check_assumption_imas();
    if (!imas.pass) throw DomainError("limcon: Assumption (imas) fails, coefficients undefined");
    const ScalingCoeffs sc = scaling_coeffs();

    ThetaGridReport rep;
    if (radius_ <= 1.5 + 1e-12 && kind_ == ModelKind::DiscreteGeometric) {
      // gamma(e^{i theta}-1) needs M at 1 - e^{i theta}/2, |.| up to 3/2
      rep.domain_failure = true;
      rep.note = "radius <= 3/2: condi11 evaluation leaves the domain of M";
      return rep;
    }

    auto lhs10 = [&](double th) {
      const Complex g = eval_gamma(1.0 - std::exp(Complex(0.0, th)));
      const double ag = std::abs(g);
      if (ag < 1e-300) throw ZeroCrossingError("limcon: gamma(1-e^{i theta}) vanishes");
      return sc.E * std::log(std::abs(2.0 - std::exp(Complex(0.0, th)))) + sc.D * std::log(ag);
    };
    auto lhs11 = [&](double th) {
      const Complex g = eval_gamma(std::exp(Complex(0.0, th)) - 1.0);
      const double ag = std::abs(g);
      if (ag < 1e-300) throw ZeroCrossingError("limcon: gamma(e^{i theta}-1) vanishes");
      return sc.F * std::log(std::abs(2.0 - std::exp(Complex(0.0, th)))) - sc.D * std::log(ag);
    };

    auto scan = [&](auto&& lhs, double& arg) {
      double best = -kInf;
      // both arcs; endpoints at pi/3 excluded (open), at pi included
      for (int side = 0; side < 2; ++side) {
        const double a = side == 0 ? kPi / 3.0 : -kPi;
        const double b = side == 0 ? kPi : -kPi / 3.0;
        for (int i = 0; i <= grid_size; ++i) {
          double th = a + (b - a) * double(i) / double(grid_size);
          if (std::abs(std::abs(th) - kPi / 3.0) < 1e-15) continue;  // open endpoint
          double v = lhs(th);
          if (v > best) {
            best = v;
            arg = th;
          }
        }
      }
      // local refinement around the grid maximizer, clamped to its arc
      double lo = arg - kPi / grid_size, hi = arg + kPi / grid_size;
      if (arg > 0) {
        lo = std::max(lo, kPi / 3.0 + 1e-9);
        hi = std::min(hi, kPi);
      } else {
        lo = std::max(lo, -kPi);
        hi = std::min(hi, -kPi / 3.0 - 1e-9);
      }
      for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (lhs(m1) < lhs(m2))
          lo = m1;
        else
          hi = m2;
      }
      const double thr = 0.5 * (lo + hi);
      if (std::abs(thr) > kPi / 3.0 + 1e-12 && std::abs(thr) <= kPi) {
        const double v = lhs(thr);
        if (v > best) {
          best = v;
          arg = thr;
        }
      }
      return best;
    };

    try {
      rep.max_lhs_condi10 = scan(lhs10, rep.argmax_condi10);
      rep.max_lhs_condi11 = scan(lhs11, rep.argmax_condi11);
    } catch (const ZeroCrossingError& e) {
      rep.domain_failure = true;
      rep.note = e.what();
      return rep;
    }
    rep.pass = rep.max_lhs_condi10 < 0.0 && rep.max_lhs_condi11 < 0.0;
    return rep;
  }

  ScalingCoeffs scaling_coeffs() const {
    const AssumptionReport imas = check_assumption_imas();
    if (!imas.pass)
      throw DomainError("scaling_coeffs: Assumption (imas) fails (denom <= 0)");
    const GammaDerivs d = gamma_derivs();
    ScalingCoeffs sc;
    sc.D = 2.0 / d.denom;
    sc.E = (d.g2 - d.g1 * d.g1 - d.g1) / d.denom;
    sc.F = (d.g1 * d.g1 - d.g2 - d.g1) / d.denom;
    sc.G = 2.0 * (d.g1 * d.g1 - d.g2) / d.denom;
    sc.drift = 2.0 * (d.g2 - d.g1 * d.g1 - d.g1) / d.denom;
    // internal identities: E + F = -g1 D and G = F - E
    const double s = std::max({1.0, std::abs(sc.E), std::abs(sc.F)});
    if (std::abs(sc.E + sc.F + d.g1 * sc.D) > 1e-9 * s ||
        std::abs(sc.G - (sc.F - sc.E)) > 1e-9 * s)
      throw DomainError("scaling_coeffs: internal identity violated");
    return sc;
  }

 private:
  static void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  }
  static void validate_pmf(const std::vector<double>& pmf) {
    require(!pmf.empty(), "pmf: empty");
    double total = 0.0;
    for (double c : pmf) {
      require(c >= -1e-15, "pmf: negative mass");
      total += c;
    }
    require(std::abs(total - 1.0) <= 1e-12, "pmf: mass does not sum to 1");
  }
  static Complex eval_poly(const std::vector<double>& c, Complex w) {
    Complex acc(0.0, 0.0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * w + c[i];
    return acc;
  }
  // d^k/dw^k of the finite pmf polynomial at w = 1/2
  static double poly_deriv_at_half(const std::vector<double>& c, int k) {
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > (std::size_t)k;) {
      double f = 1.0;
      for (int i = 0; i < k; ++i) f *= double(j - i);
      acc += c[j] * f * std::pow(0.5, double(j) - k);
    }
    return acc;
  }
  // E[Y(Y-1)...(Y-n+1) (1/2)^Y], including the geometric tail if present
  double factorial_moment_half(int n) const {
    auto fact = [](long long j, int n) {
      double f = 1.0;
      for (int i = 0; i < n; ++i) f *= double(j - i);
      return f;
    };
    double acc = 0.0;
    const long long K = (long long)pmf_.size() - 1;
    for (long long j = 0; j <= K; ++j) acc += pmf_[j] * fact(j, n) * std::pow(0.5, double(j));
    if (tail_ratio_ > 0.0) {
      double term_mass = pmf_.back();
      long long j = K;
      double tail = 0.0;
      int guard = 0;
      for (;;) {
        ++j;
        term_mass *= tail_ratio_;
        const double t = term_mass * fact(j, n) * std::pow(0.5, double(j));
        tail += t;
        if (term_mass < 1e-14 && std::abs(t) < 1e-16 * (std::abs(acc + tail) + 1.0)) break;
        if (++guard > 200000)
          throw NonConvergenceError("pmf tail truncation cannot reach 1e-14 mass", tail, tail - t);
      }
      acc += tail;
    }
    return acc;
  }

  ModelKind kind_ = ModelKind::DiscreteBernoulli;
  TimeKind time_ = TimeKind::Discrete;
  double p_ = 0.0;
  double alpha_ = 0.0;
  double lambda_ = 0.0;
  double tail_ratio_ = 0.0;
  std::vector<double> pmf_;
  double radius_ = kInf;
};

}  // namespace stasep

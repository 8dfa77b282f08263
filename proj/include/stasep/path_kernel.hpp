#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "stasep/common.hpp"
#include "stasep/contour.hpp"
#include "stasep/pgf_model.hpp"

namespace stasep {

// Initial particle positions X_0(1) > X_0(2) > ...; X_0(j) = +infinity for
// j <= 0 by convention. Only finitely many entries are ever inspected: the
// hitting time with horizon n reads X_0(1..n).
struct InitialCondition {
  std::vector<long long> positions;  // positions[j-1] = X_0(j)
  explicit InitialCondition(std::vector<long long> p) : positions(std::move(p)) {
    for (std::size_t i = 1; i < positions.size(); ++i)
      if (positions[i] >= positions[i - 1])
        throw ConfigError("initial condition not strictly decreasing");
    if (positions.empty()) throw ConfigError("initial condition is empty");
  }
  long long at(long long j) const {
    if (j < 1 || j > (long long)positions.size())
      throw DomainError("initial condition: X_0(j) requested beyond the specified range");
    return positions[std::size_t(j - 1)];
  }
  long long count() const { return (long long)positions.size(); }
};

// Sub-probability law of (tau, RW_tau) for the strictly-left Geom[1/2] walk
// (P(jump = k) = 2^{-k}, k >= 1) hitting the strict epigraph of X_0.
struct HittingLaw {
  struct Entry {
    long long step;
    long long position;
    double prob;
  };
  std::vector<Entry> entries;
  double survival = 0.0;    // mass that has not hit before the horizon
  double lost = 0.0;        // mass dropped below the user floor (bound on error)
  long long floor_used = 0;
  long long start = 0;
};

// Q^m(x,y) = 2^{-(x-y)} C(x-y-1, m-1) 1_{x >= y+m}
inline double Q_pow(long long m, long long x, long long y) {
  if (m < 1) throw DomainError("Q_pow: m must be >= 1");
  const long long d = x - y;
  if (d < m) return 0.0;
  if (d <= 60) {
    double c = 1.0;  // C(d-1, m-1) by multiplicative formula
    for (long long i = 1; i < m; ++i) c = c * double(d - i) / double(i);
    return std::ldexp(c, int(-d));
  }
  return std::exp(lchoose(d - 1, m - 1) - double(d) * std::log(2.0));
}

// Dynamic program over steps m = 0..n-1. Positions at or below X_0(n) can
// never reach the epigraph within the horizon (the walk is nonincreasing and
// the barrier is strictly decreasing), so the mass there is survival, exactly.
// A floor above that threshold produces a genuine `lost` bucket; the DP
// deepens it automatically until the bound is below 1e-10.
inline HittingLaw rw_hitting_law(const InitialCondition& ic, long long start, long long n,
                                 long long floor_hint = std::numeric_limits<long long>::min()) {
  if (n < 1) throw DomainError("rw_hitting_law: horizon must be >= 1");
  if (ic.count() < n)
    throw DomainError("rw_hitting_law: initial condition shorter than the horizon");
  HittingLaw law;
  law.start = start;
  if (start > ic.at(1)) {
    law.entries.push_back({0, start, 1.0});
    law.floor_used = start;
    return law;
  }
  // Positions at or below X_0(n) can never hit, so clamping the floor there
  // makes the DP exact: the lost bucket stays at zero and no deepening loop
  // is ever needed.
  const long long exact_floor = ic.at(n);
  if (start <= exact_floor) {
    law.survival = 1.0;
    law.floor_used = exact_floor;
    return law;
  }
  long long lo = std::min(exact_floor, start);
  if (floor_hint != std::numeric_limits<long long>::min())
    lo = std::min(lo, std::min(floor_hint, start));
  law.floor_used = lo;
  // unstopped[idx] = mass at position lo + idx
  std::vector<double> mass(std::size_t(start - lo) + 1, 0.0);
  mass[std::size_t(start - lo)] = 1.0;
  double never = 0.0;  // fell to or below the exact floor
  for (long long m = 1; m < n; ++m) {
    // one strictly-left geometric step: next[y] = sum_{x>y} mass[x] 2^{-(x-y)}
    std::vector<double> next(mass.size(), 0.0);
    double acc = 0.0;
    for (std::size_t idx = mass.size(); idx-- > 0;) {
      acc = 0.5 * (acc + (idx + 1 < mass.size() ? mass[idx + 1] : 0.0));
      next[idx] = acc;
    }
    // jumps past the floor: P(jump > idx) = 2^{-idx} from position lo + idx
    for (std::size_t idx = 0; idx < mass.size(); ++idx)
      if (mass[idx] > 0.0) never += mass[idx] * std::ldexp(1.0, -int(idx));
    const long long bar = ic.at(m + 1);
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const long long y = lo + (long long)idx;
      if (y > bar && next[idx] > 0.0) {
        law.entries.push_back({m, y, next[idx]});
        next[idx] = 0.0;
      }
    }
    mass = std::move(next);
  }
  for (double v : mass) law.survival += v;
  law.survival += never;
  return law;
}

// Sbar^{epi(X_0)}_{-t,n}(z1,z2) = E[ Sbar_{-t,n-tau}(RW_tau, z2) 1_{tau<n} ]
inline double Sbar_epi(const PgfModel& model, const InitialCondition& ic, double t, long long n,
                       long long z1, long long z2) {
  if (n < 1) throw DomainError("Sbar_epi: n must be >= 1");
  if (z1 > ic.at(1)) return Sbar_kernel(model, t, n, z1, z2);  // tau = 0 surely
  const HittingLaw law = rw_hitting_law(ic, z1, n);
  double acc = 0.0;
  for (const auto& e : law.entries)
    acc += e.prob * Sbar_kernel(model, t, n - e.step, e.position, z2);
  return acc;
}

// Finite truncation of the operator on l^2({n_1..n_M} x Z): rows/columns are
// (n_j, x) with x in [L, a_j].
struct KernelMatrix {
  std::vector<long long> ns;
  std::vector<long long> as;
  long long L = 0;
  Eigen::MatrixXd K;
  std::vector<std::pair<std::size_t, long long>> index;  // (block j, x)
  double nu_sum_bound = 0.0;  // magnitude of the last scanned nu column block
  long long nu_low = 0, nu_high = 0;
};

inline KernelMatrix assemble_Kt(const PgfModel& model, const InitialCondition& ic, double t,
                                const std::vector<long long>& ns, const std::vector<long long>& as,
                                long long L) {
  if (ns.empty() || ns.size() != as.size())
    throw ConfigError("assemble_Kt: need matching nonempty n and a vectors");
  for (std::size_t j = 0; j < ns.size(); ++j) {
    if (ns[j] < 1) throw DomainError("assemble_Kt: n_j must be >= 1");
    if (j > 0 && ns[j] <= ns[j - 1]) throw ConfigError("assemble_Kt: n strictly increasing");
  }
  for (long long a : as)
    if (L > a) throw ConfigError("assemble_Kt: L must not exceed any a_j");

  KernelMatrix km;
  km.ns = ns;
  km.as = as;
  km.L = L;
  for (std::size_t j = 0; j < ns.size(); ++j)
    for (long long x = L; x <= as[j]; ++x) km.index.emplace_back(j, x);
  const std::size_t sz = km.index.size();
  km.K = Eigen::MatrixXd::Zero(Eigen::Index(sz), Eigen::Index(sz));

  // nu-range: S_{-t,-n_i}(nu, x) vanishes for nu > n_i + x, and the epigraph
  // kernel vanishes for nu <= X_0(n_j); the sum below is exact.
  long long nu_hi = std::numeric_limits<long long>::min();
  long long nu_lo = std::numeric_limits<long long>::max();
  for (std::size_t j = 0; j < ns.size(); ++j) {
    nu_hi = std::max(nu_hi, ns[j] + as[j]);
    nu_lo = std::min(nu_lo, ic.at(ns[j]) + 1);
  }
  km.nu_low = nu_lo;
  km.nu_high = nu_hi;
  // the range can be empty (all thresholds far below the initial data), in
  // which case only the Q part survives
  const std::size_t nu_cnt = nu_hi >= nu_lo ? std::size_t(nu_hi - nu_lo) + 1 : 0;

  // tables: S[i](nu, x) and E[j](nu, y)
  std::vector<Eigen::MatrixXd> Stab(ns.size()), Etab(ns.size());
  for (std::size_t b = 0; b < ns.size(); ++b) {
    const std::size_t cols = std::size_t(as[b] - L) + 1;
    Stab[b] = Eigen::MatrixXd::Zero(Eigen::Index(nu_cnt), Eigen::Index(cols));
    Etab[b] = Eigen::MatrixXd::Zero(Eigen::Index(nu_cnt), Eigen::Index(cols));
  }
  parallel_for(0, std::int64_t(ns.size() * nu_cnt), [&](std::int64_t flat) {
    const std::size_t b = std::size_t(flat) / nu_cnt;
    const std::size_t iv = std::size_t(flat) % nu_cnt;
    const long long nu = nu_lo + (long long)iv;
    for (long long x = L; x <= as[b]; ++x) {
      Stab[b](Eigen::Index(iv), Eigen::Index(x - L)) = S_kernel(model, t, ns[b], nu, x);
      Etab[b](Eigen::Index(iv), Eigen::Index(x - L)) = Sbar_epi(model, ic, t, ns[b], nu, x);
    }
  });

  // K((n_i,x),(n_j,y)) = -Q^{n_j-n_i}(x,y) 1_{n_i<n_j} + sum_nu S_i(nu,x) E_j(nu,y)
  std::size_t row0 = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const std::size_t rows = std::size_t(as[i] - L) + 1;
    std::size_t col0 = 0;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const std::size_t cols = std::size_t(as[j] - L) + 1;
      Eigen::MatrixXd block = Stab[i].transpose() * Etab[j];
      if (ns[i] < ns[j]) {
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < cols; ++c)
            block(Eigen::Index(r), Eigen::Index(c)) -=
                Q_pow(ns[j] - ns[i], L + (long long)r, L + (long long)c);
      }
      km.K.block(Eigen::Index(row0), Eigen::Index(col0), Eigen::Index(rows), Eigen::Index(cols)) =
          block;
      col0 += cols;
    }
    row0 += rows;
  }
  km.nu_sum_bound = 0.0;
  return km;
}

struct JointProbabilityResult {
  double value = 0.0;
  double det_shallow = 0.0;
  double det_deep = 0.0;
  long long depth_shallow = 0;
  long long depth_deep = 0;
  double depth_gap = 0.0;
  bool clamped = false;
};

// P(X_t(n_j) > a_j for all j) = det(I - chibar_a K_t chibar_a), truncated at
// two depths and accepted when the determinants agree to 1e-8.
inline JointProbabilityResult joint_probability(const PgfModel& model, const InitialCondition& ic,
                                                double t, const std::vector<long long>& ns,
                                                const std::vector<long long>& as,
                                                long long depth = 0, double gap_tol = 1e-8) {
  long long lo = std::numeric_limits<long long>::max();
  for (std::size_t j = 0; j < ns.size(); ++j)
    lo = std::min({lo, as[j], ic.at(ns[j])});
  long long L1 = depth != 0 ? lo - std::abs(depth) : lo - 24;
  long long L2 = L1 - 12;

  JointProbabilityResult res;
  for (int attempt = 0;; ++attempt) {
    auto km1 = assemble_Kt(model, ic, t, ns, as, L1);
    auto km2 = assemble_Kt(model, ic, t, ns, as, L2);
    const Eigen::Index s1 = km1.K.rows(), s2 = km2.K.rows();
    const double d1 =
        (Eigen::MatrixXd::Identity(s1, s1) - km1.K).partialPivLu().determinant();
    const double d2 =
        (Eigen::MatrixXd::Identity(s2, s2) - km2.K).partialPivLu().determinant();
    res.det_shallow = d1;
    res.det_deep = d2;
    res.depth_shallow = L1;
    res.depth_deep = L2;
    res.depth_gap = std::abs(d1 - d2);
    if (res.depth_gap < gap_tol) {
      res.value = d2;
      break;
    }
    if (attempt >= 2)
      throw TruncationError("joint_probability: truncation depths did not converge");
    L1 = L2;
    L2 = L1 - 24;
  }
  if (res.value < -1e-8 || res.value > 1.0 + 1e-8)
    throw NegativeProbabilityError("joint_probability: determinant escaped [0,1] tolerance band");
  if (res.value < 0.0 || res.value > 1.0) {
    res.value = std::clamp(res.value, 0.0, 1.0);
    res.clamped = true;
  }
  return res;
}

}  // namespace stasep

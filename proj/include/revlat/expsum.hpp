#pragma once

// Exponential sums over (n, m) blocks
//
//   S(U1, U2, M) = sum_{M <= m < 2M} sum_{U1 <= n/m^2 < U2} r2(n) e(R h(n, m))
//
// together with the Weyl-differenced sum T, the phase derivative
// phi_l(n, m) = R (h_n(n, m + l) - h_n(n, m)), its distance Phi_l(m) to the
// integers, the first-derivative (Kuzmin-Landau) check and the spacing sum.
//
// Every block decides membership of a pair through the same test on the double
// q = n / m^2, so blocks that share an edge value never overlap or leave gaps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revlat/counting.hpp"
#include "revlat/errors.hpp"
#include "revlat/geometry.hpp"
#include "revlat/numeric.hpp"

namespace revlat {

enum class BlockSide {
  above,  // u_j + [U, 2U): approaching u_j from above
  below,  // u_j - [2U, U): approaching u_j from below
  tail,   // [U, 2U) beyond the last breakpoint
  plain,  // hand-built block without a breakpoint
};

inline const char* to_string(BlockSide s) {
  switch (s) {
    case BlockSide::above: return "above";
    case BlockSide::below: return "below";
    case BlockSide::tail: return "tail";
    case BlockSide::plain: return "plain";
  }
  return "?";
}

struct BlockSpec {
  double U1 = 0.0;
  double U2 = 0.0;
  std::int64_t M = 1;  // m in [M, 2M)
  double R = 0.0;
  int j = -1;  // breakpoint the block abuts; -1 for the tail
  BlockSide side = BlockSide::plain;
  double U = 0.0;  // dyadic size: distance scale to u_j, or U1 for the tail
  double norm_cap = std::numeric_limits<double>::infinity();  // n + m^2 <= norm_cap
  bool lower_open = false;  // U1 < n/m^2 instead of U1 <= n/m^2

  void validate() const {
    if (!(U1 >= 0.0) || !(U1 < U2)) throw ValidationError("block needs 0 <= U1 < U2");
    if (M < 1) throw ValidationError("block needs M >= 1");
  }

  static double q(std::int64_t n, std::int64_t m) {
    return static_cast<double>(n) / static_cast<double>(m * m);
  }

  // Membership ignoring the m-range.
  bool holds(std::int64_t n, std::int64_t m) const {
    if (n < 1 || m < 1) return false;
    const double v = q(n, m);
    if (lower_open ? !(v > U1) : !(v >= U1)) return false;
    if (!(v < U2)) return false;
    return static_cast<double>(n) + static_cast<double>(m) * static_cast<double>(m) <= norm_cap;
  }
  bool contains(std::int64_t n, std::int64_t m) const { return m >= M && m < 2 * M && holds(n, m); }

  // Integer n with holds(n, m) for every m in `ms`; the set is an interval
  // because each condition is monotone in n. Returns lo > hi when empty.
  std::pair<std::int64_t, std::int64_t> n_range(std::span<const std::int64_t> ms) const {
    std::int64_t lo = 1, hi = std::numeric_limits<std::int64_t>::max() / 4;
    for (std::int64_t m : ms) {
      const double mm = static_cast<double>(m) * static_cast<double>(m);
      lo = std::max(lo, static_cast<std::int64_t>(std::floor(U1 * mm)) - 1);
      hi = std::min(hi, static_cast<std::int64_t>(std::ceil(U2 * mm)) + 1);
      if (std::isfinite(norm_cap)) hi = std::min(hi, static_cast<std::int64_t>(std::floor(norm_cap - mm)) + 1);
    }
    lo = std::max<std::int64_t>(lo, 1);
    auto ok = [&](std::int64_t n) {
      for (std::int64_t m : ms)
        if (!holds(n, m)) return false;
      return true;
    };
    while (lo <= hi && !ok(lo)) ++lo;
    while (hi >= lo && !ok(hi)) --hi;
    return {lo, hi};
  }
  std::pair<std::int64_t, std::int64_t> n_range(std::int64_t m) const {
    const std::int64_t one[1] = {m};
    return n_range(std::span<const std::int64_t>(one));
  }
  // n with both (n, m) and (n, m + l) inside the q-range
  std::pair<std::int64_t, std::int64_t> n_range(std::int64_t m, std::int64_t l) const {
    const std::int64_t two[2] = {m, m + l};
    return n_range(std::span<const std::int64_t>(two));
  }
};

struct BlockResult {
  std::complex<double> value{0.0, 0.0};
  std::int64_t term_count = 0;
  double weight_abs = 0.0;   // sum of |r2(n)| over the terms
  double bound_ratio = 0.0;  // |S| / (M^2 R^(3/8)), or / (U M^2 R^(3/8)) for the tail
};

inline double block_target(const BlockSpec& spec) {
  const double M = static_cast<double>(spec.M);
  const double base = M * M * std::pow(std::max(spec.R, 1.0), 0.375);
  return spec.side == BlockSide::tail ? spec.U * base : base;
}

struct SumOptions {
  unsigned threads = 0;
};

inline BlockResult block_sum(const BodyOfRevolution& body, const BlockSpec& spec, const R2Table& weights,
                             const SumOptions& opt = {}) {
  spec.validate();
  const std::size_t nm = static_cast<std::size_t>(spec.M);
  std::vector<std::complex<double>> part(nm);
  std::vector<std::int64_t> count(nm, 0);
  std::vector<double> wabs(nm, 0.0);
  parallel_for(nm, opt.threads == 0 ? default_thread_count() : opt.threads, [&](std::size_t i) {
    const std::int64_t m = spec.M + static_cast<std::int64_t>(i);
    const auto [lo, hi] = spec.n_range(m);
    if (hi >= lo && hi > weights.n_max())
      throw CapacityError("block reaches n = " + std::to_string(hi) + " beyond the r2 table");
    CompensatedComplexSum s;
    CompensatedSum a;
    for (std::int64_t n = lo; n <= hi; ++n) {
      const std::complex<double> w = weights.weight(n);
      ++count[i];
      if (w == 0.0) continue;
      a.add(std::abs(w));
      const double ph = spec.R == 0.0 ? 0.0 : spec.R * support_h(body, static_cast<double>(n), static_cast<double>(m));
      s.add(w * unit_phase(ph));
    }
    part[i] = s.value();
    wabs[i] = a.value();
  });
  BlockResult out;
  CompensatedComplexSum total;
  CompensatedSum a;
  for (std::size_t i = 0; i < nm; ++i) {
    total.add(part[i]);
    a.add(wabs[i]);
    out.term_count += count[i];
  }
  out.value = total.value();
  out.weight_abs = a.value();
  out.bound_ratio = std::abs(out.value) / block_target(spec);
  return out;
}

// ---------------------------------------------------------------------------
// Dyadic decomposition of { n >= 1, m >= 1, n + m^2 <= delta^-2 }

struct SplitResult {
  std::vector<BlockSpec> blocks;
  std::vector<std::pair<std::int64_t, std::int64_t>> singletons;     // n/m^2 exactly a breakpoint
  std::vector<std::pair<std::int64_t, std::int64_t>> out_of_domain;  // n/m^2 >= u_sup
  double norm_cap = 0.0;
};

inline SplitResult dyadic_split(const BreakpointSet& bp, double delta, double R = 0.0) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (bp.u.size() < 2) throw ValidationError("breakpoint set needs at least u_0 and the sentinel");
  SplitResult out;
  const double cap = 1.0 / (delta * delta);
  out.norm_cap = cap;
  const auto m_max = static_cast<std::int64_t>(std::floor(std::sqrt(cap - 1.0)));
  const std::size_t j0 = bp.j0();
  const double u_sup = bp.u_sup;

  for (std::int64_t M = 1; M <= m_max; M *= 2) {
    const double floor_U = 1.0 / (4.0 * static_cast<double>(M) * static_cast<double>(M));
    auto push = [&](double lo, double hi, int j, BlockSide side, double U, bool open) {
      if (!(lo < hi)) return;
      BlockSpec b;
      b.U1 = lo;
      b.U2 = hi;
      b.M = M;
      b.R = R;
      b.j = j;
      b.side = side;
      b.U = U;
      b.norm_cap = cap;
      b.lower_open = open;
      out.blocks.push_back(b);
    };
    for (std::size_t j = 0; j < j0; ++j) {
      const double a = bp.u[j], b = bp.u[j + 1];
      const double quarter = (b - a) / 4.0;
      std::vector<double> sizes;  // G/4, G/8, ..., first one below the floor
      for (double U = quarter;; U /= 2.0) {
        sizes.push_back(U);
        if (U < floor_U) break;
      }
      // above u_j, innermost first
      const double mid = a + 2.0 * quarter;
      push(a, a + sizes.back(), static_cast<int>(j), BlockSide::above, sizes.back(), true);
      for (std::size_t k = sizes.size(); k-- > 0;) {
        const double lo = a + sizes[k];
        const double hi = k == 0 ? mid : a + sizes[k - 1];
        push(lo, hi, static_cast<int>(j), BlockSide::above, sizes[k], false);
      }
      // below u_{j+1}, outermost first
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        const double lo = k == 0 ? mid : b - sizes[k - 1];
        const double hi = b - sizes[k];
        push(lo, hi, static_cast<int>(j + 1), BlockSide::below, sizes[k], false);
      }
      push(b - sizes.back(), b, static_cast<int>(j + 1), BlockSide::below, sizes.back(), false);
    }
    // tail: [U, 2U) from the sentinel outwards, stopping at u_sup
    const double q_top = (cap - static_cast<double>(M * M)) / static_cast<double>(M * M);
    for (double U = bp.u[j0]; U <= q_top && U < u_sup; U *= 2.0)
      push(U, std::min(2.0 * U, u_sup), -1, BlockSide::tail, U, U == bp.u[j0]);
  }

  // Pairs the blocks leave out on purpose.
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const double mm = static_cast<double>(m * m);
    const auto n_top = static_cast<std::int64_t>(std::floor(cap - mm));
    for (double uj : bp.u) {
      const auto n = static_cast<std::int64_t>(std::llround(uj * mm));
      if (n >= 1 && n <= n_top && BlockSpec::q(n, m) == uj) out.singletons.emplace_back(n, m);
    }
    if (std::isfinite(u_sup)) {
      auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(u_sup * mm)) - 1);
      while (n <= n_top && BlockSpec::q(n, m) < u_sup) ++n;
      for (; n <= n_top; ++n) out.out_of_domain.emplace_back(n, m);
    }
  }
  std::sort(out.singletons.begin(), out.singletons.end());
  out.singletons.erase(std::unique(out.singletons.begin(), out.singletons.end()), out.singletons.end());
  return out;
}

// ---------------------------------------------------------------------------
// Weyl step

struct WeylResult {
  double T = 0.0;
  std::int64_t L = 0;                      // ceil of the requested L
  std::vector<double> inner_abs;           // |inner sum| for l = 1..L
  std::vector<std::int64_t> inner_terms;   // pair count for l = 1..L
};

// T = (1/L) sum_{l <= L} |sum e(R (h(n, m + l) - h(n, m)))| over pairs with both
// (n, m) and (n, m + l) in the block.
inline WeylResult weyl_T(const BodyOfRevolution& body, const BlockSpec& spec, double L, const SumOptions& opt = {}) {
  spec.validate();
  if (!(L >= 1.0) || L > static_cast<double>(spec.M)) throw ValidationError("weyl_T needs 1 <= L <= M");
  WeylResult out;
  out.L = static_cast<std::int64_t>(std::ceil(L));
  out.inner_abs.assign(static_cast<std::size_t>(out.L), 0.0);
  out.inner_terms.assign(static_cast<std::size_t>(out.L), 0);
  parallel_for(static_cast<std::size_t>(out.L), opt.threads == 0 ? default_thread_count() : opt.threads,
               [&](std::size_t i) {
                 const std::int64_t l = static_cast<std::int64_t>(i) + 1;
                 CompensatedComplexSum s;
                 std::int64_t terms = 0;
                 for (std::int64_t m = spec.M; m + l < 2 * spec.M; ++m) {
                   const auto [lo, hi] = spec.n_range(m, l);
                   for (std::int64_t n = lo; n <= hi; ++n) {
                     ++terms;
                     if (spec.R == 0.0) {
                       s.add({1.0, 0.0});
                       continue;
                     }
                     const double dn = static_cast<double>(n);
                     const double d = support_h(body, dn, static_cast<double>(m + l)) -
                                      support_h(body, dn, static_cast<double>(m));
                     s.add(unit_phase(spec.R * d));
                   }
                 }
                 out.inner_abs[i] = std::abs(s.value());
                 out.inner_terms[i] = terms;
               });
  CompensatedSum t;
  for (double v : out.inner_abs) t.add(v);
  out.T = t.value() / static_cast<double>(out.L);
  return out;
}

// ---------------------------------------------------------------------------
// Phase derivative and first-derivative test

inline double phase_phi_ell(const BodyOfRevolution& body, double n, double m, double l, double R) {
  if (l == 0.0) return 0.0;
  return R * (h_partial(body, n, m + l, Partial::n) - h_partial(body, n, m, Partial::n));
}

// d/dn phi_l
inline double phase_phi_ell_slope(const BodyOfRevolution& body, double n, double m, double l, double R) {
  if (l == 0.0) return 0.0;
  return R * (h_partial(body, n, m + l, Partial::nn) - h_partial(body, n, m, Partial::nn));
}

// Continuous interval I_{m,l} = [U1 (m + l)^2, U2 m^2].
inline std::pair<double, double> phi_interval(const BlockSpec& spec, std::int64_t m, std::int64_t l) {
  const double ml = static_cast<double>(m + l), md = static_cast<double>(m);
  return {spec.U1 * ml * ml, spec.U2 * md * md};
}

// min over I_{m,l} of dist(phi_l, Z). phi_l is monotone in n, so the minimum
// sits at an endpoint unless an integer lies between the endpoint values.
inline double capital_phi_ell(const BodyOfRevolution& body, std::int64_t m, std::int64_t l, const BlockSpec& spec) {
  const auto [a, b] = phi_interval(spec, m, l);
  if (!(a <= b))
    throw EmptyIntervalError("I_{m,l} is empty for m = " + std::to_string(m) + ", l = " + std::to_string(l));
  const double md = static_cast<double>(m), ld = static_cast<double>(l);
  // q < U2 is open; at the rim of a cap with an edge take the one-sided limit
  const double rim = body.upper().slope_sup();
  const double top = std::isfinite(rim) ? std::min(b, rim * rim * md * md * (1.0 - 1e-14)) : b;
  const double pa = phase_phi_ell(body, a, md, ld, spec.R);
  const double pb = phase_phi_ell(body, std::max(a, top), md, ld, spec.R);
  const double lo = std::min(pa, pb), hi = std::max(pa, pb);
  if (std::ceil(lo) <= hi) return 0.0;
  return std::min(dist_to_integer(pa), dist_to_integer(pb));
}

// |sum_{lo <= n <= hi} e(phase(n))|
template <class Phase>
double phase_sum_abs(Phase&& phase, std::int64_t lo, std::int64_t hi) {
  CompensatedComplexSum s;
  for (std::int64_t n = lo; n <= hi; ++n) s.add(unit_phase(phase(n)));
  return std::abs(s.value());
}

struct KuzminLandauResult {
  double sum_abs = 0.0;
  double Phi = 0.0;
  double bound = 0.0;  // 1 / Phi
  std::int64_t terms = 0;
  bool holds = false;  // sum_abs <= C / Phi
};

inline KuzminLandauResult kuzmin_landau_check(const BodyOfRevolution& body, std::int64_t m, std::int64_t l,
                                              const BlockSpec& spec, double C = 3.0) {
  KuzminLandauResult out;
  out.Phi = capital_phi_ell(body, m, l, spec);
  if (!(out.Phi > 0.0)) throw HypothesisError("Phi_l(m) = 0: the first-derivative bound needs Phi > 0");
  const auto [lo, hi] = spec.n_range(m, l);
  const double md = static_cast<double>(m), ld = static_cast<double>(l);
  if (hi > lo) {
    const double probes[3] = {static_cast<double>(lo), 0.5 * static_cast<double>(lo + hi), static_cast<double>(hi)};
    double sign = 0.0;
    for (double n : probes) {
      const double d = phase_phi_ell_slope(body, n, md, ld, spec.R);
      if (d == 0.0 || (sign != 0.0 && (d > 0.0) != (sign > 0.0)))
        throw MonotonicityError("phi_l changes monotonicity on I_{m,l} (m = " + std::to_string(m) +
                                ", l = " + std::to_string(l) + ")");
      sign = d;
    }
  }
  out.terms = std::max<std::int64_t>(0, hi - lo + 1);
  out.sum_abs = phase_sum_abs(
      [&](std::int64_t n) {
        const double dn = static_cast<double>(n);
        return spec.R * (support_h(body, dn, md + ld) - support_h(body, dn, md));
      },
      lo, hi);
  out.bound = 1.0 / out.Phi;
  out.holds = out.sum_abs <= C * out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Spacing sum

struct SpacingResult {
  double lhs = 0.0;
  double A = 0.0;
  double B = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

inline double spacing_bound(double A, double B, double H) { return A * H + B * (1.0 + std::abs(std::log(H))); }

// lhs = sum min(H, 1/a_m). B is the secant slope of the counting function
// c(x) = #{a_m <= x} over [0, 1/2] and A the least value with c(x) <= A + B x.
inline SpacingResult spacing_sum(std::vector<double> a, double H) {
  if (!(H > 0.0)) throw ValidationError("H must be positive");
  for (double v : a)
    if (!(v >= 0.0 && v <= 0.5)) throw ValidationError("spacing values must lie in [0, 1/2]");
  SpacingResult out;
  std::sort(a.begin(), a.end());
  const auto N = static_cast<double>(a.size());
  // capped terms are counted, so H * count is one rounding
  std::int64_t capped = 0;
  CompensatedSum rest;
  for (double v : a) {
    if (v == 0.0 || 1.0 / v >= H)
      ++capped;
    else
      rest.add(1.0 / v);
  }
  out.lhs = static_cast<double>(capped) * H + rest.value();

  const auto zeros = static_cast<double>(std::upper_bound(a.begin(), a.end(), 0.0) - a.begin());
  out.B = 2.0 * (N - zeros);
  out.A = zeros;
  for (std::size_t k = 0; k < a.size(); ++k) {
    // c(a_k) counts ties, so only the last of a run matters
    if (k + 1 < a.size() && a[k + 1] == a[k]) continue;
    out.A = std::max(out.A, static_cast<double>(k + 1) - out.B * a[k]);
  }
  out.rhs = spacing_bound(out.A, out.B, H);
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace revlat

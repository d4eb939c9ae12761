#pragma once

// Exponent fitting and the ratio-stability harness.
//
// Every asymptotic claim "lhs << rhs" or "lhs ~ rhs" is measured as
// ratio = lhs / rhs on a grid indexed by a scale parameter (R, an approach
// level towards a breakpoint, or a grid refinement). A claim passes when the
// per-scale maximum ratio has log-log slope <= kSlopeTolerance against the
// scale; two-sided claims also need the per-scale minimum slope >= -kSlopeTolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "revlat/counting.hpp"
#include "revlat/errors.hpp"
#include "revlat/expsum.hpp"
#include "revlat/geometry.hpp"
#include "revlat/hv.hpp"
#include "revlat/numeric.hpp"

namespace revlat {

inline constexpr double kSlopeTolerance = 0.05;

// ---------------------------------------------------------------------------
// Exponent fit

struct ExponentFit {
  double alpha_hat = 0.0;
  double ci = 0.0;  // standard error of the slope
  double intercept = 0.0;
  std::size_t n_points = 0;
  std::vector<double> residuals;
};

// Least-squares slope of log(running max |E|) against log R.
inline ExponentFit fit_alpha(std::vector<CountRecord> records) {
  std::erase_if(records, [](const CountRecord& r) { return r.E == 0.0; });
  std::sort(records.begin(), records.end(), [](const CountRecord& a, const CountRecord& b) { return a.R < b.R; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].R == records[i - 1].R) throw ValidationError("fit_alpha needs distinct R values");
  if (records.size() < 8) throw InsufficientDataError("fit_alpha needs at least 8 records with E != 0");
  std::vector<double> x, y;
  double run = 0.0;
  for (const auto& r : records) {
    if (!(r.R > 0.0)) throw ValidationError("fit_alpha needs R > 0");
    run = std::max(run, std::abs(r.E));
    x.push_back(std::log(r.R));
    y.push_back(std::log(run));
  }
  const LineFit f = least_squares(x, y);
  ExponentFit out;
  out.alpha_hat = f.slope;
  out.ci = f.slope_stderr;
  out.intercept = f.intercept;
  out.n_points = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) out.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Claim registry

enum class Relation { upper, two_sided };

struct ClaimInfo {
  std::string id;
  std::string statement;
  Relation relation;
  std::string scale;  // what the per-level scale measures
};

inline const std::vector<ClaimInfo>& claim_registry() {
  static const std::vector<ClaimInfo> reg = {
      {"fprime-decay", "F'(u) ~ (1+u)^(-3/2) for u >= 0", Relation::two_sided, "grid points"},
      {"fsecond-order", "F''(u) ~ (u-u_j)^d_j as u -> u_j and ~ u^(-5/2) as u -> inf", Relation::two_sided,
       "approach level 2^k"},
      {"mixed-nnm", "h_nnm(n, m) ~ U^d_j / M^4", Relation::two_sided, "approach level 2^k"},
      {"mixed-nmm", "h_nmm(n, m) ~ 1 / M^3 near u_j with d_j > 0 or u_j = 0", Relation::two_sided,
       "approach level 2^k"},
      {"shift-linear", "h_n(n, m+l) - h_n(n, m) = F'(u_j) l/(m(m+l)) + O(l U^(d_j+1) / M^2)", Relation::upper,
       "approach level 2^k"},
      {"second-derivative-sum", "inner sum << R^1/2 l^1/2 U^((d+2)/2) + R^-1/2 l^-1/2 U^(-d/2) M^2", Relation::upper,
       "R"},
      {"phase-count-spacing", "#{m : Phi_l(m) <= x} << 1 + R l/M^2 + M (1 + M^2/(R l)) x", Relation::upper, "R"},
      {"phase-count-divisor", "#{m : Phi_l(m) <= x} << R^eps (1 + R l U^(d+1) + M^2 x)", Relation::upper, "R"},
      {"first-derivative-sum", "|inner sum| << 1 / Phi_l(m)", Relation::upper, "R"},
      {"weyl-step", "|S|^2 << R^eps (U^2 M^6 / L + U M^3 T)", Relation::upper, "R"},
      {"spacing-assembly", "T << R^eps (A_L H_L + B_L)", Relation::upper, "R"},
      {"block-bound", "S(U1, U2, M) << M^2 R^(3/8+eps) below the last breakpoint", Relation::upper, "R"},
      {"tail-bound", "S(U, 2U, M) << U M^2 R^(3/8+eps) beyond the last breakpoint", Relation::upper, "R"},
  };
  return reg;
}

inline const ClaimInfo& find_claim(const std::string& id) {
  for (const auto& c : claim_registry())
    if (c.id == id) return c;
  throw ValidationError("unknown claim id '" + id + "'");
}

// ---------------------------------------------------------------------------
// Grids and reports

struct ClaimGrid {
  std::vector<double> R;             // empty = claim default
  int levels = 0;                    // approach levels or refinements; 0 = claim default
  std::vector<std::int64_t> M;       // empty = claim default
  std::vector<double> M_fraction = {0.125, 0.25, 0.5};  // M = c R^(5/8) when M is empty
  std::vector<std::int64_t> ell;     // empty = claim default
  std::vector<double> x = {0.0, 1.0 / 64.0, 1.0 / 16.0, 0.25, 0.5};
  std::vector<double> offsets = {1.0, 1.5, 2.0};  // distance multiples inside a level
  std::vector<int> j;                // breakpoint indices; -1 = infinity; empty = all admissible
  double drift = 0.5;                // "U^(d+1) M small enough": allowed drift / main step of the phase
  double u_max = 1000.0;
  double U1 = 0.25;                  // lower edge of the weyl-step blocks
  std::vector<double> U = {0.25, 0.5, 1.0};
  std::vector<std::int64_t> L = {1, 2, 4};
};

struct RatioPoint {
  double scale = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> params;
};

struct RatioReport {
  std::string claim;
  Relation relation = Relation::upper;
  std::vector<RatioPoint> points;
  std::vector<double> scales;
  std::vector<double> level_max;
  std::vector<double> level_min;
  double min = 0.0;
  double max = 0.0;
  double slope = std::numeric_limits<double>::quiet_NaN();      // of log level_max
  double slope_min = std::numeric_limits<double>::quiet_NaN();  // of log level_min
  double spread_change = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::string note;
};

// With `finest_half`, the slopes use only the finer half of the scales.
inline RatioReport summarize(const ClaimInfo& info, std::vector<RatioPoint> pts, std::string note = {},
                             bool finest_half = false) {
  RatioReport rep;
  rep.claim = info.id;
  rep.relation = info.relation;
  rep.note = std::move(note);
  rep.points = std::move(pts);
  if (rep.points.empty()) {
    rep.note += (rep.note.empty() ? "" : "; ") + std::string("no grid point satisfies the hypotheses");
    return rep;
  }
  std::map<double, std::pair<double, double>> by;
  bool bad = false;
  rep.min = std::numeric_limits<double>::infinity();
  rep.max = -std::numeric_limits<double>::infinity();
  for (const auto& p : rep.points) {
    if (!std::isfinite(p.ratio) || p.ratio < 0.0) bad = true;
    if (info.relation == Relation::two_sided && !(p.ratio > 0.0)) bad = true;
    rep.min = std::min(rep.min, p.ratio);
    rep.max = std::max(rep.max, p.ratio);
    auto [it, fresh] = by.try_emplace(p.scale, p.ratio, p.ratio);
    if (!fresh) {
      it->second.first = std::min(it->second.first, p.ratio);
      it->second.second = std::max(it->second.second, p.ratio);
    }
  }
  std::vector<double> sx, smax, smin_x, smin;
  const std::size_t skip = finest_half ? by.size() / 2 : 0;
  for (const auto& [s, mm] : by) {
    rep.scales.push_back(s);
    rep.level_min.push_back(mm.first);
    rep.level_max.push_back(mm.second);
    if (rep.scales.size() <= skip) continue;
    if (mm.second > 0.0) {
      sx.push_back(s);
      smax.push_back(mm.second);
    }
    if (mm.first > 0.0) {
      smin_x.push_back(s);
      smin.push_back(mm.first);
    }
  }
  if (bad) {
    rep.note += (rep.note.empty() ? "" : "; ") + std::string("non-finite or non-positive ratio");
    return rep;
  }
  if (sx.size() < 2) {
    rep.note += (rep.note.empty() ? "" : "; ") + std::string("slope needs at least two scales");
    return rep;
  }
  rep.slope = log_log_slope(sx, smax);
  rep.pass = rep.slope <= kSlopeTolerance;
  if (info.relation == Relation::two_sided) {
    rep.slope_min = log_log_slope(smin_x, smin);
    rep.pass = rep.pass && rep.slope_min >= -kSlopeTolerance;
  }
  return rep;
}

namespace detail {

struct ClaimContext {
  const BodyOfRevolution& body;
  const GeneratrixProfile& cap;
  BreakpointSet bp;
};

inline double gap_below(const BreakpointSet& bp, std::size_t j) {
  return j == 0 ? std::numeric_limits<double>::infinity() : bp.u[j] - bp.u[j - 1];
}
inline double gap_above(const BreakpointSet& bp, std::size_t j) {
  return j + 1 < bp.u.size() ? bp.u[j + 1] - bp.u[j] : std::numeric_limits<double>::infinity();
}

// u_j with d_j > 0, or u_j = 0 where F''(u) u -> 0 regardless of d_j.
inline bool linear_near(const BreakpointSet& bp, std::size_t j) { return bp.d[j] > 0 || bp.u[j] == 0.0; }

inline std::vector<int> chosen_breakpoints(const ClaimContext& c, const ClaimGrid& g, bool allow_inf,
                                           bool need_linear) {
  std::vector<int> js;
  const bool inf_ok = allow_inf && c.cap.vertical_equator();
  if (g.j.empty()) {
    for (std::size_t j = 0; j < c.bp.u.size(); ++j)
      if (!need_linear || linear_near(c.bp, j)) js.push_back(static_cast<int>(j));
    if (inf_ok) js.push_back(-1);
    return js;
  }
  for (int j : g.j) {
    if (j == -1) {
      if (!inf_ok)
        throw HypothesisError(allow_inf ? "the u -> inf regime needs a cap with a vertical equator"
                                        : "this claim has no u -> inf regime");
    } else if (j < 0 || static_cast<std::size_t>(j) >= c.bp.u.size()) {
      throw HypothesisError("breakpoint index " + std::to_string(j) + " out of range");
    } else if (need_linear && !linear_near(c.bp, static_cast<std::size_t>(j))) {
      throw HypothesisError("breakpoint " + std::to_string(j) + " has d_j = 0 and u_j != 0");
    }
    js.push_back(j);
  }
  return js;
}

inline std::vector<std::int64_t> m_samples(std::int64_t M) {
  std::vector<std::int64_t> ms = {M, M + M / 2, 2 * M - 1};
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

inline void check_M(const std::vector<std::int64_t>& Ms) {
  for (auto M : Ms)
    if (M < 1) throw HypothesisError("M must be >= 1");
}

// Points approaching every chosen breakpoint (and infinity) level by level.
// visit(level_scale, j, u, distance) with distance = |u - u_j|, or u itself for j = -1.
template <class Visit>
void approach(const ClaimContext& c, const ClaimGrid& g, int levels, bool allow_inf, bool need_linear, Visit&& visit) {
  const auto js = chosen_breakpoints(c, g, allow_inf, need_linear);
  const std::size_t j0 = c.bp.j0();
  for (double t : g.offsets)
    if (!(t >= 1.0 && t <= 2.0)) throw HypothesisError("offsets must lie in [1, 2]");
  for (int k = 0; k < levels; ++k) {
    const double scale = std::ldexp(1.0, k);
    for (int j : js) {
      if (j < 0) {
        const double U = 2.0 * c.bp.u[j0] * scale;
        for (double t : g.offsets) visit(scale, j, t * U, t * U);
        continue;
      }
      const auto sj = static_cast<std::size_t>(j);
      const double U0 = std::min({gap_below(c.bp, sj), gap_above(c.bp, sj), 4.0 * c.bp.u_sup}) / 8.0;
      const double U = U0 / scale;
      for (double t : g.offsets) {
        if (sj < j0) visit(scale, j, c.bp.u[sj] + t * U, t * U);
        if (sj > 0) visit(scale, j, c.bp.u[sj] - t * U, t * U);
      }
    }
  }
}

inline double order_of(const BreakpointSet& bp, int j) { return j < 0 ? bp.d_inf : static_cast<double>(bp.d[static_cast<std::size_t>(j)]); }

// Fourth-order difference, one-sided when the stencil would cross `lo`.
template <class F>
double fd_derivative(F&& f, double x, double h, double lo) {
  if (x - 2.0 * h >= lo) return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
  return (-25.0 * f(x) + 48.0 * f(x + h) - 36.0 * f(x + 2.0 * h) + 16.0 * f(x + 3.0 * h) - 3.0 * f(x + 4.0 * h)) /
         (12.0 * h);
}

inline RatioPoint point(double scale, double lhs, double rhs, std::vector<std::pair<std::string, double>> params) {
  return {scale, lhs, rhs, lhs / rhs, std::move(params)};
}

inline std::vector<std::int64_t> shifts_up_to(std::int64_t top) {
  std::vector<std::int64_t> out;
  for (std::int64_t l = 1; l <= top; l *= 2) out.push_back(l);
  if (top >= 1 && out.back() != top) out.push_back(top);
  return out;
}

inline std::vector<double> R_list(const ClaimGrid& g, std::vector<double> fallback = {64.0, 128.0, 256.0, 512.0}) {
  const auto& Rs = g.R.empty() ? fallback : g.R;
  for (double R : Rs)
    if (!(R > 1.0)) throw HypothesisError("R must exceed 1");
  return Rs;
}

inline std::vector<std::int64_t> shifts_for(const ClaimGrid& g, double UM) {
  const auto top = static_cast<std::int64_t>(std::floor(UM));
  if (g.ell.empty()) return shifts_up_to(top);
  for (auto l : g.ell)
    if (l < 1 || static_cast<double>(l) > UM)
      throw HypothesisError("shift l = " + std::to_string(l) + " outside [1, U M]");
  return g.ell;
}

// ---------------------------------------------------------------------------
// Claims

inline RatioReport fprime_decay(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("fprime-decay");
  const int levels = g.levels > 0 ? g.levels : 4;
  const double top = std::min(g.u_max, 0.99 * c.bp.u_sup);
  if (!(top > 0.0)) throw HypothesisError("empty u range");
  auto F = [&](double u) { return big_F(c.cap, u); };
  std::vector<RatioPoint> pts;
  std::vector<double> spread;
  for (int k = 0; k < levels; ++k) {
    const int N = 64 << (2 * k);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double u = top * i / N;
      const double h = 1e-3 * (1.0 + u);
      const double d = std::abs(fd_derivative(F, u, h, 0.0));
      auto p = point(static_cast<double>(N), d, std::pow(1.0 + u, -1.5), {{"u", u}});
      lo = std::min(lo, p.ratio);
      hi = std::max(hi, p.ratio);
      pts.push_back(std::move(p));
    }
    spread.push_back(hi / lo);
  }
  auto rep = summarize(info, std::move(pts));
  if (spread.size() >= 2) {
    rep.spread_change = 0.0;
    for (std::size_t k = 1; k < spread.size(); ++k)
      rep.spread_change = std::max(rep.spread_change, std::abs(spread[k] / spread[k - 1] - 1.0));
    rep.pass = rep.pass && rep.spread_change <= 0.05;
  }
  return rep;
}

inline RatioReport fsecond_order(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("fsecond-order");
  std::vector<RatioPoint> pts;
  approach(c, g, g.levels > 0 ? g.levels : 12, true, false, [&](double s, int j, double u, double dist) {
    const double rhs = std::pow(dist, order_of(c.bp, j));
    pts.push_back(point(s, std::abs(F_second(c.cap, u)), rhs, {{"j", j}, {"u", u}}));
  });
  return summarize(info, std::move(pts), c.cap.vertical_equator() ? "" : "cap ends in an edge: no u -> inf regime", true);
}

inline RatioReport mixed_nnm(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("mixed-nnm");
  const std::vector<std::int64_t> Ms = g.M.empty() ? std::vector<std::int64_t>{4, 16, 64} : g.M;
  check_M(Ms);
  std::vector<RatioPoint> pts;
  approach(c, g, g.levels > 0 ? g.levels : 12, true, false, [&](double s, int j, double u, double dist) {
    const double rhs_u = std::pow(dist, order_of(c.bp, j));
    for (auto M : Ms)
      for (auto m : m_samples(M)) {
        const double md = static_cast<double>(m), Md = static_cast<double>(M);
        const double v = std::abs(h_partial(c.body, u * md * md, md, Partial::nnm));
        pts.push_back(point(s, v, rhs_u / (Md * Md * Md * Md), {{"j", j}, {"u", u}, {"M", Md}, {"m", md}}));
      }
  });
  return summarize(info, std::move(pts), c.cap.vertical_equator() ? "" : "cap ends in an edge: no u -> inf regime", true);
}

inline RatioReport mixed_nmm(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("mixed-nmm");
  const std::vector<std::int64_t> Ms = g.M.empty() ? std::vector<std::int64_t>{4, 16, 64} : g.M;
  check_M(Ms);
  std::vector<RatioPoint> pts;
  approach(c, g, g.levels > 0 ? g.levels : 12, false, true, [&](double s, int j, double u, double) {
    for (auto M : Ms)
      for (auto m : m_samples(M)) {
        const double md = static_cast<double>(m), Md = static_cast<double>(M);
        const double v = std::abs(h_partial(c.body, u * md * md, md, Partial::nmm));
        pts.push_back(point(s, v, 1.0 / (Md * Md * Md), {{"j", j}, {"u", u}, {"M", Md}, {"m", md}}));
      }
  });
  return summarize(info, std::move(pts), {}, true);
}

inline RatioReport shift_linear(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("shift-linear");
  check_M(g.M);
  std::vector<RatioPoint> pts;
  approach(c, g, g.levels > 0 ? g.levels : 12, false, true, [&](double s, int j, double u, double dist) {
    const double uj = c.bp.u[static_cast<std::size_t>(j)];
    const double Cj = F_prime(c.cap, uj);
    const double d = order_of(c.bp, j);
    std::vector<std::int64_t> Ms = g.M;
    if (Ms.empty()) {
      std::int64_t M0 = 1;
      while (static_cast<double>(M0) * dist < 4.0) M0 *= 2;
      Ms = {M0, 4 * M0};
    }
    for (auto M : Ms) {
      const double Md = static_cast<double>(M);
      for (auto l : shifts_for(g, dist * Md)) {
        for (auto m : {M, M + M / 2}) {
          const double md = static_cast<double>(m), ld = static_cast<double>(l);
          const double n = u * md * md;
          const double diff = h_partial(c.body, n, md + ld, Partial::n) - h_partial(c.body, n, md, Partial::n);
          const double lhs = std::abs(diff - Cj * ld / (md * (md + ld)));
          const double rhs = ld * std::pow(dist, d + 1.0) / (Md * Md);
          pts.push_back(point(s, lhs, rhs, {{"j", j}, {"u", u}, {"M", Md}, {"m", md}, {"l", ld}}));
        }
      }
    }
  });
  return summarize(info, std::move(pts), {}, true);
}

// A block plus one shift, tagged by its position in an R-scaled family.
struct Shape {
  std::string tag;
  BlockSpec block;
  double d = 0.0;
  std::int64_t l = 1;
};

inline std::vector<double> scaled_R_list(const ClaimGrid& g) {
  return R_list(g, {64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0});
}

// 2^from .. 2^top: the spacing hypothesis needs large M.
inline std::vector<double> large_R_list(const ClaimGrid& g, int from, int top) {
  std::vector<double> Rs;
  for (int k = from; k <= top; ++k) Rs.push_back(std::ldexp(1.0, k));
  return R_list(g, Rs);
}

// M = c R^(5/8) for each fraction c (at least 2), or the explicit list.
inline std::vector<std::pair<std::string, std::int64_t>> scaled_M(const ClaimGrid& g, double R) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  if (!g.M.empty()) {
    check_M(g.M);
    for (auto M : g.M) out.emplace_back("M" + std::to_string(M), M);
    return out;
  }
  for (std::size_t i = 0; i < g.M_fraction.size(); ++i) {
    const double c = g.M_fraction[i];
    if (!(c > 0.0 && c <= 0.5)) throw HypothesisError("M fractions must lie in (0, 1/2]");
    out.emplace_back("c" + std::to_string(i), std::max<std::int64_t>(2, std::llround(c * std::pow(R, 0.625))));
  }
  return out;
}

// Shifts 1, top/2 and top, or the explicit list.
inline std::vector<std::pair<std::string, std::int64_t>> scaled_shifts(const ClaimGrid& g, double top) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  if (!g.ell.empty()) {
    for (auto l : g.ell) {
      if (l < 1 || static_cast<double>(l) > top)
        throw HypothesisError("shift l = " + std::to_string(l) + " outside [1, U M]");
      out.emplace_back("l" + std::to_string(l), l);
    }
    return out;
  }
  const auto t = static_cast<std::int64_t>(std::floor(top));
  if (t < 1) return out;
  out.emplace_back("l0", 1);
  out.emplace_back("l1", std::max<std::int64_t>(1, t / 2));
  out.emplace_back("l2", t);
  return out;
}

inline BlockSpec near_block(const ClaimContext& c, std::size_t j, bool above, double U, std::int64_t M, double R) {
  BlockSpec b;
  b.U1 = above ? c.bp.u[j] + U : c.bp.u[j] - 2.0 * U;
  b.U2 = above ? c.bp.u[j] + 2.0 * U : c.bp.u[j] - U;
  b.M = M;
  b.R = R;
  b.j = static_cast<int>(j);
  b.side = above ? BlockSide::above : BlockSide::below;
  b.U = U;
  return b;
}

// Calls visit(tag, j, above) for each side of each chosen finite breakpoint.
template <class Visit>
void each_side(const ClaimContext& c, const std::vector<int>& js, Visit&& visit) {
  const std::size_t j0 = c.bp.j0();
  for (int j : js) {
    if (j < 0) continue;
    const auto sj = static_cast<std::size_t>(j);
    if (sj < j0) visit("j" + std::to_string(j) + "a", sj, true);
    if (sj > 0) visit("j" + std::to_string(j) + "b", sj, false);
  }
}

// Shapes per R, keeping only tags that occur at every R.
template <class Make>
std::vector<std::pair<double, std::vector<Shape>>> common_shapes(const std::vector<double>& Rs, Make&& make) {
  std::vector<std::pair<double, std::vector<Shape>>> out;
  std::map<std::string, std::size_t> seen;
  for (double R : Rs) {
    out.emplace_back(R, make(R));
    for (const auto& s : out.back().second) ++seen[s.tag];
  }
  for (auto& [R, shapes] : out)
    std::erase_if(shapes, [&](const Shape& s) { return seen[s.tag] != Rs.size(); });
  return out;
}

inline double gap_near(const ClaimContext& c, std::size_t j) {
  return std::min(gap_below(c.bp, j), gap_above(c.bp, j));
}

// Blocks at distance U = gap/4, gap/16, gap/64 from each breakpoint, and for
// a vertical equator tail blocks [U, 2U) from the last breakpoint on; all
// with U M >= R^(3/8).
inline std::vector<Shape> curvature_shapes(const ClaimContext& c, const ClaimGrid& g, double R, bool with_tail) {
  std::vector<Shape> out;
  const double floor_UM = std::pow(R, 0.375);
  const auto js = chosen_breakpoints(c, g, with_tail, false);
  for (const auto& [tm, M] : scaled_M(g, R)) {
    const double Md = static_cast<double>(M);
    each_side(c, js, [&](const std::string& tj, std::size_t j, bool above) {
      for (int k = 0; k < 3; ++k) {
        const double U = gap_near(c, j) / 4.0 / std::ldexp(1.0, 2 * k);
        if (U * Md < floor_UM) continue;
        for (const auto& [tl, l] : scaled_shifts(g, std::min(U * Md, Md - 1.0)))
          out.push_back({tm + tj + "k" + std::to_string(k) + tl, near_block(c, j, above, U, M, R),
                         static_cast<double>(c.bp.d[j]), l});
      }
    });
    if (std::find(js.begin(), js.end(), -1) == js.end()) continue;
    const double u0 = c.bp.u[c.bp.j0()];
    for (int k = 0; k < 3; ++k) {
      const double U = u0 * std::ldexp(1.0, k);
      if (!(U < c.bp.u_sup) || U > std::pow(R, 1.25) / (Md * Md) || U * Md < floor_UM) continue;
      BlockSpec b;
      b.U1 = U;
      b.U2 = std::min(2.0 * U, c.bp.u_sup);
      b.M = M;
      b.R = R;
      b.j = -1;
      b.side = BlockSide::tail;
      b.U = U;
      for (const auto& [tl, l] : scaled_shifts(g, Md - 1.0))
        out.push_back({tm + "tk" + std::to_string(k) + tl, b, c.bp.d_inf, l});
    }
  }
  return out;
}

// Along the count's m-steps the phase derivative moves by R l h_nmm plus at
// most R l U M^2 h_nnm; true when drift <= allowed * main over the block.
inline bool step_sign_fixed(const BodyOfRevolution& body, const BlockSpec& b, double allowed) {
  const double Md = static_cast<double>(b.M);
  for (double m : {Md, 2.0 * Md})
    for (int i = 0; i <= 4; ++i) {
      const double u = b.U1 + (b.U2 - b.U1) * i / 4.0;
      const double n = u * m * m;
      const double main = std::abs(h_partial(body, n, m, Partial::nmm));
      const double drift = b.U * m * m * std::abs(h_partial(body, n, m, Partial::nnm));
      if (!(drift <= allowed * main)) return false;
    }
  return true;
}

// Blocks near breakpoints with d_j > 0 or u_j = 0 at U = (a / M)^(1/(d+1)),
// a = 4^-k, so that U^(d+1) M stays fixed as M grows. Only blocks passing
// step_sign_fixed are kept.
inline std::vector<Shape> spacing_shapes(const ClaimContext& c, const ClaimGrid& g, double R) {
  if (!(g.drift > 0.0 && g.drift < 1.0)) throw HypothesisError("drift threshold must lie in (0, 1)");
  std::vector<Shape> out;
  const auto js = chosen_breakpoints(c, g, false, true);
  for (const auto& [tm, M] : scaled_M(g, R)) {
    const double Md = static_cast<double>(M);
    each_side(c, js, [&](const std::string& tj, std::size_t j, bool above) {
      const double d = static_cast<double>(c.bp.d[j]);
      for (int k = 0; k < 7; ++k) {
        const double a = std::ldexp(1.0, -2 * k);
        const double U = std::pow(a / Md, 1.0 / (d + 1.0));
        if (U > gap_near(c, j) / 4.0 || U * Md < 1.0) continue;
        const auto b = near_block(c, j, above, U, M, R);
        if (!step_sign_fixed(c.body, b, g.drift)) continue;
        for (const auto& [tl, l] : scaled_shifts(g, std::min(U * Md, Md - 1.0)))
          out.push_back({tm + tj + "a" + std::to_string(k) + tl, b, d, l});
      }
    });
  }
  return out;
}

// As curvature_shapes near linear breakpoints, with U <= 1.
inline std::vector<Shape> divisor_shapes(const ClaimContext& c, const ClaimGrid& g, double R) {
  std::vector<Shape> out;
  const auto js = chosen_breakpoints(c, g, false, true);
  for (const auto& [tm, M] : scaled_M(g, R)) {
    const double Md = static_cast<double>(M);
    each_side(c, js, [&](const std::string& tj, std::size_t j, bool above) {
      for (int k = 0; k < 3; ++k) {
        const double U = std::min(1.0, gap_near(c, j) / 4.0) / std::ldexp(1.0, 2 * k);
        if (U * Md < std::pow(R, 0.375)) continue;
        for (const auto& [tl, l] : scaled_shifts(g, std::min(U * Md, Md - 1.0)))
          out.push_back({tm + tj + "k" + std::to_string(k) + tl, near_block(c, j, above, U, M, R),
                         static_cast<double>(c.bp.d[j]), l});
      }
    });
  }
  return out;
}

inline std::vector<std::pair<std::string, double>> shape_params(const Shape& s) {
  return {{"U1", s.block.U1}, {"U2", s.block.U2}, {"M", static_cast<double>(s.block.M)},
          {"l", static_cast<double>(s.l)}, {"j", s.block.j}};
}

inline RatioReport second_derivative_sum(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("second-derivative-sum");
  std::vector<RatioPoint> pts;
  const auto all = common_shapes(scaled_R_list(g), [&](double R) { return curvature_shapes(c, g, R, true); });
  for (const auto& [R, shapes] : all) {
    for (const auto& s : shapes) {
      const auto& b = s.block;
      const double U = b.U, Md = static_cast<double>(b.M), ld = static_cast<double>(s.l);
      for (auto m : m_samples(b.M)) {
        if (m + s.l >= 2 * b.M) m = 2 * b.M - 1 - s.l;
        const auto [lo, hi] = b.n_range(m, s.l);
        if (hi < lo) continue;
        const double md = static_cast<double>(m);
        const double sum = phase_sum_abs(
            [&](std::int64_t n) {
              const double dn = static_cast<double>(n);
              return R * (support_h(c.body, dn, md + ld) - support_h(c.body, dn, md));
            },
            lo, hi);
        const double rhs =
            std::sqrt(R * ld) * std::pow(U, (s.d + 2.0) / 2.0) + std::pow(U, -s.d / 2.0) * Md * Md / std::sqrt(R * ld);
        auto params = shape_params(s);
        params.emplace_back("m", md);
        pts.push_back(point(R, sum, rhs, std::move(params)));
      }
    }
  }
  return summarize(info, std::move(pts), c.cap.vertical_equator() ? "" : "cap ends in an edge: no tail blocks");
}

template <class Shapes, class Rhs>
RatioReport phase_count(const ClaimInfo& info, const ClaimContext& c, const ClaimGrid& g, const std::vector<double>& Rs,
                        Shapes&& shapes_of, Rhs&& rhs_of) {
  for (double x : g.x)
    if (!(x >= 0.0 && x <= 0.5)) throw HypothesisError("count thresholds x must lie in [0, 1/2]");
  std::vector<RatioPoint> pts;
  for (const auto& [R, shapes] : common_shapes(Rs, shapes_of)) {
    for (const auto& s : shapes) {
      const auto& b = s.block;
      std::vector<double> Phi;
      for (std::int64_t m = b.M; m + s.l < 2 * b.M; ++m) {
        const auto [lo, hi] = phi_interval(b, m, s.l);
        if (lo > hi) continue;
        Phi.push_back(capital_phi_ell(c.body, m, s.l, b));
      }
      if (Phi.empty()) continue;
      for (double x : g.x) {
        const auto cnt = static_cast<double>(std::count_if(Phi.begin(), Phi.end(), [&](double p) { return p <= x; }));
        auto params = shape_params(s);
        params.emplace_back("x", x);
        pts.push_back(point(R, cnt, rhs_of(R, static_cast<double>(b.M), static_cast<double>(s.l), b.U, s.d, x),
                            std::move(params)));
      }
    }
  }
  return summarize(info, std::move(pts));
}

inline RatioReport phase_count_spacing(const ClaimContext& c, const ClaimGrid& g) {
  return phase_count(
      find_claim("phase-count-spacing"), c, g, large_R_list(g, 15, 20), [&](double R) { return spacing_shapes(c, g, R); },
      [](double R, double M, double l, double, double, double x) {
        return 1.0 + R * l / (M * M) + M * (1.0 + M * M / (R * l)) * x;
      });
}

inline RatioReport phase_count_divisor(const ClaimContext& c, const ClaimGrid& g) {
  return phase_count(
      find_claim("phase-count-divisor"), c, g, scaled_R_list(g), [&](double R) { return divisor_shapes(c, g, R); },
      [](double R, double M, double l, double U, double d, double x) {
        return 1.0 + R * l * std::pow(U, d + 1.0) + M * M * x;
      });
}

inline RatioReport first_derivative_sum(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("first-derivative-sum");
  std::vector<RatioPoint> pts;
  const auto all = common_shapes(scaled_R_list(g), [&](double R) { return curvature_shapes(c, g, R, false); });
  for (const auto& [R, shapes] : all) {
    for (const auto& s : shapes) {
      const auto& b = s.block;
      for (auto m : m_samples(b.M)) {
        if (m + s.l >= 2 * b.M) m = 2 * b.M - 1 - s.l;
        const auto [lo, hi] = phi_interval(b, m, s.l);
        if (lo > hi || capital_phi_ell(c.body, m, s.l, b) <= 1e-3) continue;
        try {
          const auto r = kuzmin_landau_check(c.body, m, s.l, b);
          auto params = shape_params(s);
          params.emplace_back("m", static_cast<double>(m));
          pts.push_back(point(R, r.sum_abs, r.bound, std::move(params)));
        } catch (const MonotonicityError&) {
        }
      }
    }
  }
  return summarize(info, std::move(pts));
}

inline RatioReport weyl_step(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("weyl-step");
  const std::vector<std::int64_t> Ms = g.M.empty() ? std::vector<std::int64_t>{4, 8, 16} : g.M;
  check_M(Ms);
  std::vector<RatioPoint> pts;
  for (double R : R_list(g, {128.0, 256.0, 512.0})) {
    for (double U : g.U) {
      const double U2 = g.U1 + U;
      if (!(U > 0.0) || U2 > std::pow(R, 1.25)) throw HypothesisError("weyl-step needs 0 < U and U2 <= R^(5/4)");
      if (!(U2 < c.bp.u_sup)) throw HypothesisError("weyl-step block leaves the cap's normal range");
      for (auto M : Ms) {
        const double Md = static_cast<double>(M);
        if (Md > std::pow(R, 0.625)) throw HypothesisError("weyl-step needs M <= R^(5/8)");
        BlockSpec b;
        b.U1 = g.U1;
        b.U2 = U2;
        b.M = M;
        b.R = R;
        b.U = U;
        const auto n_top = static_cast<std::int64_t>(std::ceil(U2 * 4.0 * Md * Md)) + 2;
        const auto S = block_sum(c.body, b, weight_table(c.body, n_top));
        for (auto L : g.L) {
          if (L < 1 || L > M) throw HypothesisError("weyl-step needs 1 <= L <= M");
          const double Ld = static_cast<double>(L);
          const double T = weyl_T(c.body, b, Ld).T;
          const double lhs = std::norm(S.value);
          const double rhs = U * U * std::pow(Md, 6.0) / Ld + U * Md * Md * Md * T;
          pts.push_back(point(R, lhs, rhs, {{"U", U}, {"M", Md}, {"L", Ld}, {"T", T}}));
        }
      }
    }
  }
  return summarize(info, std::move(pts));
}

// T against A H + B with the divisor-count pair A = 1 + R L U^(d+1), B = M^2
// and the trivial H = U M^2.
inline RatioReport spacing_assembly(const ClaimContext& c, const ClaimGrid& g) {
  const ClaimInfo& info = find_claim("spacing-assembly");
  std::vector<RatioPoint> pts;
  const auto all = common_shapes(R_list(g, {64.0, 128.0, 256.0, 512.0, 1024.0}), [&](double R) { return divisor_shapes(c, g, R); });
  for (const auto& [R, shapes] : all) {
    for (const auto& s : shapes) {
      const auto& b = s.block;
      const double Md = static_cast<double>(b.M), Ld = static_cast<double>(s.l);
      const double T = weyl_T(c.body, b, Ld).T;
      const double A = 1.0 + R * Ld * std::pow(b.U, s.d + 1.0);
      const double H = b.U * Md * Md;
      pts.push_back(point(R, T, A * H + Md * Md, shape_params(s)));
    }
  }
  return summarize(info, std::move(pts));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Theorem suite

struct TheoremRow {
  double R = 0.0;
  double delta = 0.0;
  std::size_t blocks = 0;
  double max_block = 0.0;  // max |S| / (M^2 R^(3/8)) below the last breakpoint
  double max_tail = 0.0;   // max |S| / (U M^2 R^(3/8)) beyond it
  BlockSpec argmax_block;
  BlockSpec argmax_tail;
};

struct TheoremSuite {
  std::vector<TheoremRow> rows;
  double slope_block = std::numeric_limits<double>::quiet_NaN();
  double slope_tail = std::numeric_limits<double>::quiet_NaN();
  bool pass_block = false;
  bool pass_tail = false;
};

inline TheoremSuite theorem_suite(const BodyOfRevolution& body, const std::vector<double>& R_list,
                                  const std::function<double(double)>& delta_rule = default_delta,
                                  const SumOptions& opt = {}) {
  if (R_list.empty()) throw HypothesisError("R list is empty");
  for (double R : R_list)
    if (!(R > 1.0)) throw HypothesisError("R must exceed 1");
  const auto bp = find_breakpoints(body.upper());
  TheoremSuite out;
  for (double R : R_list) {
    TheoremRow row;
    row.R = R;
    row.delta = delta_rule(R);
    const auto split = dyadic_split(bp, row.delta, R);
    const auto table = weight_table(body, static_cast<std::int64_t>(std::ceil(split.norm_cap)));
    row.blocks = split.blocks.size();
    for (const auto& b : split.blocks) {
      const auto res = block_sum(body, b, table, opt);
      if (b.side == BlockSide::tail) {
        if (res.bound_ratio > row.max_tail) {
          row.max_tail = res.bound_ratio;
          row.argmax_tail = b;
        }
      } else if (res.bound_ratio > row.max_block) {
        row.max_block = res.bound_ratio;
        row.argmax_block = b;
      }
    }
    out.rows.push_back(row);
  }
  auto slope_of = [&](auto get) {
    std::vector<double> x, y;
    for (const auto& r : out.rows)
      if (get(r) > 0.0) {
        x.push_back(r.R);
        y.push_back(get(r));
      }
    return x.size() >= 2 ? log_log_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  };
  out.slope_block = slope_of([](const TheoremRow& r) { return r.max_block; });
  out.slope_tail = slope_of([](const TheoremRow& r) { return r.max_tail; });
  out.pass_block = out.slope_block <= kSlopeTolerance;
  out.pass_tail = out.slope_tail <= kSlopeTolerance;
  return out;
}

namespace detail {

inline RatioReport theorem_claim(const ClaimInfo& info, const BodyOfRevolution& body, const ClaimGrid& g, bool tail) {
  const auto suite = theorem_suite(body, R_list(g));
  std::vector<RatioPoint> pts;
  for (const auto& r : suite.rows) {
    const auto& b = tail ? r.argmax_tail : r.argmax_block;
    const double v = tail ? r.max_tail : r.max_block;
    pts.push_back(point(r.R, v, 1.0, {{"U1", b.U1}, {"U2", b.U2}, {"M", static_cast<double>(b.M)}, {"blocks", static_cast<double>(r.blocks)}}));
  }
  return summarize(info, std::move(pts));
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline RatioReport ratio_harness(const std::string& claim_id, const BodyOfRevolution& body, const ClaimGrid& grid = {}) {
  const ClaimInfo& info = find_claim(claim_id);
  if (claim_id == "block-bound") return detail::theorem_claim(info, body, grid, false);
  if (claim_id == "tail-bound") return detail::theorem_claim(info, body, grid, true);
  const detail::ClaimContext c{body, body.upper(), find_breakpoints(body.upper())};
  if (claim_id == "fprime-decay") return detail::fprime_decay(c, grid);
  if (claim_id == "fsecond-order") return detail::fsecond_order(c, grid);
  if (claim_id == "mixed-nnm") return detail::mixed_nnm(c, grid);
  if (claim_id == "mixed-nmm") return detail::mixed_nmm(c, grid);
  if (claim_id == "shift-linear") return detail::shift_linear(c, grid);
  if (claim_id == "second-derivative-sum") return detail::second_derivative_sum(c, grid);
  if (claim_id == "phase-count-spacing") return detail::phase_count_spacing(c, grid);
  if (claim_id == "phase-count-divisor") return detail::phase_count_divisor(c, grid);
  if (claim_id == "first-derivative-sum") return detail::first_derivative_sum(c, grid);
  if (claim_id == "weyl-step") return detail::weyl_step(c, grid);
  if (claim_id == "spacing-assembly") return detail::spacing_assembly(c, grid);
  throw ValidationError("claim '" + claim_id + "' is registered but has no evaluator");
}

}  // namespace revlat

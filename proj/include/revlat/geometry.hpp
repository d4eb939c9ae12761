#pragma once

// Generatrix geometry for bodies of revolution
//
//   E = { (x, y, z) : f2(r) <= z <= f1(r), 0 <= r <= r_inf },  r = sqrt(x^2 + y^2)
//
// Both caps are stored with the "upper" contract: f(0) is the maximum,
// f'(0) = 0, f'' < 0 and -f' strictly increasing. The lower cap is kept as its
// reflection g2 = -f2, so every routine below is written once, for an upper
// cap, and the lower half of the body is reached through the mirror.
//
// With phi the inverse of -f', the restricted support function is
//
//   h(n, m) = g(sqrt(n), 0, m) = sqrt(n) r* + m f(r*),   r* = phi(sqrt(n) / m)
//
// for m > 0, and everything about h is expressed through F(u) = f(phi(sqrt u)):
//
//   dh/dm        = F(n/m^2)
//   dh/dn        = r* / (2 sqrt n)
//   d2h/dn dm    = F'(n/m^2) / m^2
//   d3h/dn2 dm   = F''(n/m^2) / m^4
//   d3h/dn dm2   = -2 m^-3 (F''(n/m^2) n/m^2 + F'(n/m^2))
//
// with F'(u) = 1 / (2 f''(r)) and F''(u) = f'''(r) / (4 f''(r)^3 sqrt u),
// r = phi(sqrt u). Curvatures are signed: k(r) = f'' (1 + f'^2)^(-3/2) < 0 on
// an upper cap.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "revlat/errors.hpp"
#include "revlat/numeric.hpp"

namespace revlat {

enum class Orientation { upper, lower };

class GeneratrixProfile {
 public:
  using Scalar = std::function<double(double)>;
  // higher(k, r) evaluates f^(k)(r) for k > 4, up to higher_max_order.
  using Higher = std::function<double(int, double)>;

  struct Evaluators {
    Scalar f, d1, d2, d3, d4;
    Higher higher;
    int higher_max_order = 4;
  };

  static constexpr int kValidationGrid = 10000;

  GeneratrixProfile(Evaluators ev, double r_inf, Orientation orientation = Orientation::upper)
      : ev_(std::move(ev)), r_inf_(r_inf), orientation_(orientation) {
    if (!(r_inf_ > 0.0) || !std::isfinite(r_inf_))
      throw ValidationError("r_inf must be a positive finite number");
    if (!ev_.f || !ev_.d1 || !ev_.d2 || !ev_.d3 || !ev_.d4)
      throw ValidationError("profile needs evaluators for f and its first four derivatives");
    if (!ev_.higher) ev_.higher_max_order = 4;
    validate();
  }

  double value(double r) const { return ev_.f(r); }

  double derivative(int k, double r) const {
    switch (k) {
      case 0: return ev_.f(r);
      case 1: return ev_.d1(r);
      case 2: return ev_.d2(r);
      case 3: return ev_.d3(r);
      case 4: return ev_.d4(r);
      default:
        if (k < 0 || k > ev_.higher_max_order)
          throw DomainError("no evaluator for derivative of order " + std::to_string(k));
        return ev_.higher(k, r);
    }
  }

  bool has_derivative(int k) const { return k >= 0 && k <= ev_.higher_max_order; }
  int max_derivative_order() const { return ev_.higher_max_order; }
  double r_inf() const { return r_inf_; }
  Orientation orientation() const { return orientation_; }

  // sup of -f' over [0, r_inf); +inf when the cap closes with a vertical tangent.
  double slope_sup() const { return slope_sup_; }
  bool vertical_equator() const { return std::isinf(slope_sup_); }

  // min |f''| seen on the validation grid; used to size rounding margins.
  double min_abs_second() const { return min_abs_second_; }

  // z -> -z. An upper cap becomes a lower cap and vice versa.
  GeneratrixProfile reflected() const {
    Evaluators ev;
    auto src = ev_;
    ev.f = [src](double r) { return -src.f(r); };
    ev.d1 = [src](double r) { return -src.d1(r); };
    ev.d2 = [src](double r) { return -src.d2(r); };
    ev.d3 = [src](double r) { return -src.d3(r); };
    ev.d4 = [src](double r) { return -src.d4(r); };
    if (src.higher) ev.higher = [src](int k, double r) { return -src.higher(k, r); };
    ev.higher_max_order = src.higher_max_order;
    return GeneratrixProfile(std::move(ev), r_inf_,
                             orientation_ == Orientation::upper ? Orientation::lower : Orientation::upper);
  }

  void require_upper(const char* what) const {
    if (orientation_ != Orientation::upper)
      throw DomainError(std::string(what) + " requires an upper-oriented profile (reflect it first)");
  }

 private:
  void validate() {
    const double sign = orientation_ == Orientation::upper ? 1.0 : -1.0;
    const double d2_axis = ev_.d2(0.0);
    if (std::abs(ev_.d1(0.0)) > 1e-12 * (1.0 + std::abs(d2_axis)))
      throw ValidationError("profile must close smoothly at the axis (f'(0) = 0)");
    double prev = -std::numeric_limits<double>::infinity();
    min_abs_second_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kValidationGrid; ++i) {
      const double r = r_inf_ * static_cast<double>(i) / kValidationGrid;
      const double s2 = sign * ev_.d2(r);
      if (!(s2 < 0.0))
        throw ValidationError("profile is not strictly concave at r = " + std::to_string(r));
      min_abs_second_ = std::min(min_abs_second_, std::abs(s2));
      const double slope = -sign * ev_.d1(r);
      if (i > 0 && !(slope > prev))
        throw ValidationError("-f' is not strictly increasing near r = " + std::to_string(r));
      prev = slope;
    }
    const double end = -sign * ev_.d1(r_inf_);
    slope_sup_ = (std::isfinite(end) && end < 1e300) ? end : std::numeric_limits<double>::infinity();
  }

  Evaluators ev_;
  double r_inf_;
  Orientation orientation_;
  double slope_sup_ = 0.0;
  double min_abs_second_ = 0.0;
};

// ---------------------------------------------------------------------------
// Sections and bodies

struct CircularSection {};

// r = sqrt(Q(x + alpha, y + beta)) with Q = (Q*)^-1 and
// Q*(x, y) = a x^2 + 2 b x y + c y^2 integral and positive definite.
struct EllipticSection {
  std::int64_t a = 1, b = 0, c = 1;
  double alpha = 0.0, beta = 0.0;

  std::int64_t det_star() const { return a * c - b * b; }
  // det Q* * Q(x, y); an integer-coefficient form.
  double scaled_q(double x, double y) const {
    return static_cast<double>(c) * x * x - 2.0 * static_cast<double>(b) * x * y +
           static_cast<double>(a) * y * y;
  }
  double q(double x, double y) const { return scaled_q(x, y) / static_cast<double>(det_star()); }
  std::int64_t q_star(std::int64_t x, std::int64_t y) const { return a * x * x + 2 * b * x * y + c * y * y; }
  bool unshifted() const { return alpha == 0.0 && beta == 0.0; }

  void validate() const {
    if (a <= 0 || det_star() <= 0)
      throw ValidationError("Q* must be positive definite (a > 0, ac - b^2 > 0)");
  }
};

using Section = std::variant<CircularSection, EllipticSection>;

enum class EquatorCheck { enforce, skip };

class BodyOfRevolution {
 public:
  // `lower_mirror` is the reflection -f2 of the lower cap (upper contract).
  BodyOfRevolution(GeneratrixProfile upper, GeneratrixProfile lower_mirror, Section section = CircularSection{},
                   EquatorCheck check = EquatorCheck::enforce)
      : upper_(std::move(upper)), lower_(std::move(lower_mirror)), section_(section) {
    upper_.require_upper("body upper cap");
    lower_.require_upper("body lower cap mirror");
    if (std::abs(upper_.r_inf() - lower_.r_inf()) > 1e-12 * upper_.r_inf())
      throw ValidationError("both caps must share r_inf");
    if (const auto* e = std::get_if<EllipticSection>(&section_)) e->validate();
    if (check == EquatorCheck::enforce) {
      const double r = upper_.r_inf();
      const double top = upper_.value(r);
      const double bottom = -lower_.value(r);
      if (!(std::abs(top - bottom) <= 1e-9 * (1.0 + std::abs(top))))
        throw ValidationError("caps do not meet at the equator: f1(r_inf) = " + std::to_string(top) +
                              ", f2(r_inf) = " + std::to_string(bottom));
    }
  }

  const GeneratrixProfile& upper() const { return upper_; }
  const GeneratrixProfile& lower_mirror() const { return lower_; }
  double r_inf() const { return upper_.r_inf(); }
  const Section& section() const { return section_; }
  bool circular() const { return std::holds_alternative<CircularSection>(section_); }

  double f1(double r) const { return upper_.value(r); }
  double f2(double r) const { return -lower_.value(r); }

  // Cap whose outer normals have vertical component of sign `m_sign`.
  const GeneratrixProfile& cap(double m_sign) const { return m_sign >= 0.0 ? upper_ : lower_; }

 private:
  GeneratrixProfile upper_;
  GeneratrixProfile lower_;
  Section section_;
};

// ---------------------------------------------------------------------------
// phi, F and the support function

// The r in [0, r_inf) with -f'(r) = s.
inline double phi(const GeneratrixProfile& p, double s) {
  p.require_upper("phi");
  if (!(s >= 0.0)) throw DomainError("phi: slope must be nonnegative");
  if (!(s < p.slope_sup()))
    throw DomainError("phi: slope " + std::to_string(s) + " is not attained (sup of -f' is " +
                      std::to_string(p.slope_sup()) + ")");
  if (s == 0.0) return 0.0;
  return bisect_increasing([&p](double r) { return -p.derivative(1, r); }, s, 0.0, p.r_inf());
}

inline double big_F(const GeneratrixProfile& p, double u) {
  if (!(u >= 0.0)) throw DomainError("F: u must be nonnegative");
  return p.value(phi(p, std::sqrt(u)));
}

// F'(u) = 1 / (2 f''(phi(sqrt u))).
inline double F_prime(const GeneratrixProfile& p, double u) {
  if (!(u >= 0.0)) throw DomainError("F': u must be nonnegative");
  return 0.5 / p.derivative(2, phi(p, std::sqrt(u)));
}

// F''(u) = f'''(r) / (4 f''(r)^3 sqrt u), continued to u = 0 by
// F''(0) = -f''''(0) / (4 f''(0)^4).
inline double F_second(const GeneratrixProfile& p, double u) {
  if (!(u >= 0.0)) throw DomainError("F'': u must be nonnegative");
  if (u == 0.0) {
    const double a = p.derivative(2, 0.0);
    return -p.derivative(4, 0.0) / (4.0 * a * a * a * a);
  }
  const double r = phi(p, std::sqrt(u));
  const double d2 = p.derivative(2, r);
  return p.derivative(3, r) / (4.0 * d2 * d2 * d2 * std::sqrt(u));
}

// h(n, m) for an upper cap, m > 0.
inline double support_h(const GeneratrixProfile& p, double n, double m) {
  if (!(n >= 0.0) || !(m > 0.0)) throw DomainError("support_h needs n >= 0 and m > 0");
  const double rs = phi(p, std::sqrt(n) / m);
  return std::sqrt(n) * rs + m * p.value(rs);
}

// h(n, m) = g(sqrt n, 0, m) for the whole body; m < 0 goes through the lower
// cap mirror since g(v, 0, m) = g~(v, 0, -m) for the reflected body.
inline double support_h(const BodyOfRevolution& body, double n, double m) {
  if (m == 0.0) throw DomainError("support_h: equatorial direction (m = 0)");
  return support_h(body.cap(m), n, std::abs(m));
}

enum class Partial { m, n, nm, nn, nnm, nmm };

inline const char* to_string(Partial p) {
  switch (p) {
    case Partial::m: return "dm";
    case Partial::n: return "dn";
    case Partial::nm: return "dnm";
    case Partial::nn: return "dnn";
    case Partial::nnm: return "dnnm";
    case Partial::nmm: return "dnmm";
  }
  return "?";
}

namespace detail {

// dh/dn at n = 0: r* ~ s / (-f''(0)).
inline double dn_axis(const GeneratrixProfile& p, double m) { return 0.5 / (m * -p.derivative(2, 0.0)); }

// d2h/dn2 = (s phi'(s) - phi(s)) / (4 n^(3/2)), phi' = -1/f''. The bracket
// cancels to O(s^3); below s = 1e-6 the axis limit f''''(0) / (12 A^4 m^3),
// A = -f''(0), is used instead.
inline double dnn(const GeneratrixProfile& p, double n, double m) {
  const double s = std::sqrt(n) / m;
  if (s < 1e-6) {
    const double a = -p.derivative(2, 0.0);
    return p.derivative(4, 0.0) / (12.0 * a * a * a * a * m * m * m);
  }
  const double rs = phi(p, s);
  const double dphi = -1.0 / p.derivative(2, rs);
  return (s * dphi - rs) / (4.0 * n * std::sqrt(n));
}

}  // namespace detail

// Closed-form partial derivatives of h for an upper cap, m > 0.
inline double h_partial(const GeneratrixProfile& p, double n, double m, Partial which) {
  if (!(n >= 0.0) || !(m > 0.0)) throw DomainError("h_partial needs n >= 0 and m > 0");
  const double u = n / (m * m);
  switch (which) {
    case Partial::m: return big_F(p, u);
    case Partial::n: {
      if (n == 0.0) {
        (void)phi(p, 0.0);
        return detail::dn_axis(p, m);
      }
      return phi(p, std::sqrt(n) / m) / (2.0 * std::sqrt(n));
    }
    case Partial::nm: return F_prime(p, u) / (m * m);
    case Partial::nn: return detail::dnn(p, n, m);
    case Partial::nnm: return F_second(p, u) / (m * m * m * m);
    case Partial::nmm: return -2.0 / (m * m * m) * (F_second(p, u) * u + F_prime(p, u));
  }
  throw DomainError("unknown partial");
}

// Same, for the whole body and any m != 0. Each m-derivative flips sign under
// the mirror m -> -m.
inline double h_partial(const BodyOfRevolution& body, double n, double m, Partial which) {
  if (m == 0.0) throw DomainError("h_partial: equatorial direction (m = 0)");
  const double v = h_partial(body.cap(m), n, std::abs(m), which);
  if (m > 0.0) return v;
  switch (which) {
    case Partial::m:
    case Partial::nm:
    case Partial::nnm: return -v;
    default: return v;
  }
}

// ---------------------------------------------------------------------------
// Curvature

inline double generatrix_curvature(const GeneratrixProfile& p, double r) {
  if (!(r >= 0.0) || !(r < p.r_inf())) throw DomainError("curvature: r outside [0, r_inf)");
  const double d1 = p.derivative(1, r);
  return p.derivative(2, r) * std::pow(1.0 + d1 * d1, -1.5);
}

struct PrincipalCurvatures {
  double meridian = 0.0;  // |k(r)|, along the generatrix
  double parallel = 0.0;  // |f'| / (r sqrt(1 + f'^2)), around the axis
  double gaussian() const { return meridian * parallel; }
};

inline PrincipalCurvatures principal_curvatures(const GeneratrixProfile& p, double r) {
  PrincipalCurvatures k;
  const double d1 = p.derivative(1, r);
  const double w = 1.0 + d1 * d1;
  k.meridian = std::abs(p.derivative(2, r)) / (w * std::sqrt(w));
  if (r < 1e-12 * p.r_inf())
    k.parallel = k.meridian;  // umbilic at the axis
  else
    k.parallel = std::abs(d1) / (r * std::sqrt(w));
  return k;
}

// Principal curvatures at r_inf^- for a cap closing with a vertical tangent.
inline PrincipalCurvatures equatorial_curvatures(const GeneratrixProfile& p) {
  if (!p.vertical_equator())
    throw DomainError("equator is not a regular point of this cap (finite slope at r_inf)");
  return principal_curvatures(p, p.r_inf() * (1.0 - 1e-12));
}

// Gaussian curvature of the boundary at the point with outer normal `dir`.
inline double gaussian_curvature(const BodyOfRevolution& body, const std::array<double, 3>& dir) {
  const double horiz = std::hypot(dir[0], dir[1]);
  const double vert = dir[2];
  if (vert == 0.0) throw DomainError("gaussian_curvature: equatorial direction");
  const GeneratrixProfile& cap = body.cap(vert);
  const double rs = phi(cap, horiz / std::abs(vert));
  return principal_curvatures(cap, rs).gaussian();
}

// ---------------------------------------------------------------------------
// Breakpoints: zeros of f''' and their vanishing orders

struct BreakpointOptions {
  int grid = 4096;
  double sentinel_fraction = 0.9;  // r_{j0} = fraction * r_inf by default
  int max_order = 12;
  double zero_rel = 1e-9;
};

struct BreakpointSet {
  std::vector<double> r;  // r_0 = 0, zeros of f''', then the sentinel r_{j0}
  std::vector<double> u;  // (f'(r_j))^2
  std::vector<int> d;     // vanishing orders; d.back() = 0 for the sentinel
  double d_inf = -2.5;
  double u_sup = std::numeric_limits<double>::infinity();  // (sup -f')^2

  std::size_t j0() const { return r.size() - 1; }
};

inline BreakpointSet find_breakpoints(const GeneratrixProfile& p, const BreakpointOptions& opt = {}) {
  p.require_upper("find_breakpoints");
  if (opt.grid < 16) throw ValidationError("breakpoint grid too coarse");
  if (!(opt.sentinel_fraction > 0.0 && opt.sentinel_fraction < 1.0))
    throw ValidationError("sentinel fraction must lie in (0, 1)");
  const double r_inf = p.r_inf();
  const double scan_hi = r_inf * (1.0 - 1e-6);
  const double scale_hi = opt.sentinel_fraction * r_inf;

  // Per-order magnitude scales for the zero threshold, over [0, fraction * r_inf].
  const int top = std::min(opt.max_order, p.max_derivative_order());
  std::vector<double> scale(static_cast<std::size_t>(top) + 1, 0.0);
  for (int i = 0; i <= opt.grid; ++i) {
    const double r = scale_hi * i / opt.grid;
    for (int k = 3; k <= top; ++k) scale[k] = std::max(scale[k], std::abs(p.derivative(k, r)));
  }
  auto is_zero = [&](int k, double v) { return std::abs(v) < opt.zero_rel * (1.0 + scale[k]); };

  // Axis: f''' ~ r^(2 d0 + 1).
  if (!is_zero(3, p.derivative(3, 0.0)))
    throw OrderDetectionError("f'''(0) != 0: profile is not even at the axis");
  int axis_order = -1;
  for (int k = 4; k <= top; ++k) {
    if (!is_zero(k, p.derivative(k, 0.0))) {
      axis_order = k - 3;
      break;
    }
  }
  if (axis_order < 0)
    throw OrderDetectionError("all derivatives of f''' up to order " + std::to_string(top) +
                              " vanish at the axis (infinite-order zero)");
  if (axis_order % 2 == 0) throw OrderDetectionError("f''' vanishes to even order at the axis");

  // Interior zeros of f''' on (0, r_inf).
  std::vector<double> grid(static_cast<std::size_t>(opt.grid) + 1);
  std::vector<double> val(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = scan_hi * static_cast<double>(i + 1) / static_cast<double>(grid.size());
    val[i] = p.derivative(3, grid[i]);
  }
  auto root_between = [&](int k, double lo, double hi) {
    const double s_lo = p.derivative(k, lo) < 0.0 ? -1.0 : 1.0;
    return bisect_increasing([&](double r) { return s_lo * -p.derivative(k, r); }, 0.0, lo, hi);
  };
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (val[i] * val[i + 1] < 0.0) {
      roots.push_back(root_between(3, grid[i], grid[i + 1]));
    } else if (val[i] == 0.0 && i > 0 && val[i - 1] * val[i + 1] < 0.0) {
      roots.push_back(grid[i]);
    }
  }
  // Touching (even-order) zeros: local minima of |f'''| without a sign change.
  // f'''' changes sign there.
  if (top >= 4) {
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double a = std::abs(val[i - 1]), b = std::abs(val[i]), c = std::abs(val[i + 1]);
      if (!(b <= a && b <= c) || val[i - 1] * val[i + 1] < 0.0) continue;
      const double lo = grid[i - 1], hi = grid[i + 1];
      if (p.derivative(4, lo) * p.derivative(4, hi) >= 0.0) continue;
      const double rj = root_between(4, lo, hi);
      if (is_zero(3, p.derivative(3, rj))) roots.push_back(rj);
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> uniq;
  for (double r : roots) {
    if (r < 1e-6 * r_inf) continue;
    if (uniq.empty() || r - uniq.back() > 1e-9 * r_inf) uniq.push_back(r);
  }

  BreakpointSet bp;
  bp.r.push_back(0.0);
  bp.d.push_back((axis_order - 1) / 2);
  for (double rj : uniq) {
    int order = -1;
    for (int k = 4; k <= top; ++k) {
      if (!is_zero(k, p.derivative(k, rj))) {
        order = k - 3;
        break;
      }
    }
    if (order < 0)
      throw OrderDetectionError("infinite-order zero of f''' at r = " + std::to_string(rj));
    bp.r.push_back(rj);
    bp.d.push_back(order);
  }
  double sentinel = opt.sentinel_fraction * r_inf;
  if (sentinel <= bp.r.back()) sentinel = 0.5 * (bp.r.back() + r_inf);
  bp.r.push_back(sentinel);
  bp.d.push_back(0);
  for (double rj : bp.r) {
    const double s = p.derivative(1, rj);
    bp.u.push_back(s * s);
  }
  bp.u_sup = std::isinf(p.slope_sup()) ? std::numeric_limits<double>::infinity() : p.slope_sup() * p.slope_sup();
  return bp;
}

}  // namespace revlat

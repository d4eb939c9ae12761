#pragma once

// Lattice points in dilated bodies of revolution, slice by slice in z.
//
// For an integer z the slice of R*E at height z is the disc (or ellipse) of
// squared radius R^2 S(z/R), where
//
//   S(t) = min(rho_1(t), rho_2(-t))^2,   rho_i(level) = sup{ r : g_i(r) >= level }
//
// with g_1 = f1 and g_2 = -f2 the two caps in upper orientation. S is found by
// bisection in s = r^2 and the integer bound floor(R^2 S) is taken with a small
// outward margin sized from the profile's flattest point, so boundary points
// (which are common: the unit ball at integer R has them on every slice) land
// inside.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "revlat/errors.hpp"
#include "revlat/geometry.hpp"
#include "revlat/numeric.hpp"

namespace revlat {

// ---------------------------------------------------------------------------
// r2 and its twisted analogue

struct CountingLimits {
  std::uint64_t table_bytes = std::uint64_t{1} << 30;
  double max_R = 1.0e5;
};

class R2Table {
 public:
  enum class Kind { circular, elliptic };

  static R2Table circular(std::vector<std::int64_t> counts) {
    R2Table t;
    t.kind_ = Kind::circular;
    t.counts_ = std::move(counts);
    return t;
  }
  static R2Table elliptic(EllipticSection form, std::vector<std::complex<double>> values) {
    R2Table t;
    t.kind_ = Kind::elliptic;
    t.form_ = form;
    t.twisted_ = std::move(values);
    return t;
  }

  Kind kind() const { return kind_; }
  const EllipticSection& form() const { return form_; }
  std::int64_t n_max() const {
    return static_cast<std::int64_t>(kind_ == Kind::circular ? counts_.size() : twisted_.size()) - 1;
  }

  // r2(n); only for circular tables.
  std::int64_t count(std::int64_t n) const {
    if (kind_ != Kind::circular) throw DomainError("integer r2 requested from a twisted table");
    check(n);
    return counts_[static_cast<std::size_t>(n)];
  }
  std::complex<double> weight(std::int64_t n) const {
    check(n);
    if (kind_ == Kind::circular) return {static_cast<double>(counts_[static_cast<std::size_t>(n)]), 0.0};
    return twisted_[static_cast<std::size_t>(n)];
  }
  // Largest |weight| in the table.
  double max_abs() const {
    double best = 0.0;
    if (kind_ == Kind::circular)
      for (auto v : counts_) best = std::max(best, static_cast<double>(v));
    else
      for (auto v : twisted_) best = std::max(best, std::abs(v));
    return best;
  }

  const std::vector<std::int64_t>& counts() const { return counts_; }

 private:
  void check(std::int64_t n) const {
    if (n < 0 || n > n_max())
      throw CapacityError("index " + std::to_string(n) + " outside r2 table of size " + std::to_string(n_max() + 1));
  }

  Kind kind_ = Kind::circular;
  EllipticSection form_{};
  std::vector<std::int64_t> counts_;
  std::vector<std::complex<double>> twisted_;
};

inline void check_table_budget(std::int64_t n_max, std::size_t entry_bytes, const CountingLimits& lim) {
  if (n_max < 0) throw ValidationError("table size must be nonnegative");
  const long double bytes = (static_cast<long double>(n_max) + 1.0L) * static_cast<long double>(entry_bytes);
  if (bytes > static_cast<long double>(lim.table_bytes))
    throw CapacityError("r2 table up to " + std::to_string(n_max) + " exceeds the memory budget");
}

// Shell sieve: one increment per lattice point of the disc x^2 + y^2 <= n_max.
inline R2Table sieve_r2(std::int64_t n_max, const CountingLimits& lim = {}) {
  check_table_budget(n_max, sizeof(std::int64_t), lim);
  std::vector<std::int64_t> v(static_cast<std::size_t>(n_max) + 1, 0);
  const std::int64_t top = isqrt(n_max);
  for (std::int64_t x = -top; x <= top; ++x) {
    const std::int64_t rest = n_max - x * x;
    const std::int64_t ymax = isqrt(rest);
    for (std::int64_t y = -ymax; y <= ymax; ++y) ++v[static_cast<std::size_t>(x * x + y * y)];
  }
  return R2Table::circular(std::move(v));
}

// (1/det Q) sum_{Q*(x,y) = n} e(alpha x + beta y), with det Q = 1/det Q*.
inline std::complex<double> r2_star(const EllipticSection& form, std::int64_t n) {
  form.validate();
  if (n < 0) return {0.0, 0.0};
  const std::int64_t det = form.det_star();
  // a x^2 + 2 b x y + c y^2 = n has real x only for det y^2 <= a n.
  const std::int64_t ymax = isqrt((form.a * n) / det);
  CompensatedComplexSum acc;
  for (std::int64_t y = -ymax; y <= ymax; ++y) {
    const std::int64_t disc = form.a * n - det * y * y;
    if (disc < 0) continue;
    const std::int64_t sq = isqrt(disc);
    if (sq * sq != disc) continue;
    for (std::int64_t s : {-sq, sq}) {
      const std::int64_t num = -form.b * y + s;
      if (num % form.a == 0) acc.add(unit_phase(form.alpha * static_cast<double>(num / form.a) + form.beta * static_cast<double>(y)));
      if (sq == 0) break;
    }
  }
  return static_cast<double>(det) * acc.value();
}

inline R2Table sieve_r2_star(const EllipticSection& form, std::int64_t n_max, const CountingLimits& lim = {}) {
  form.validate();
  check_table_budget(n_max, sizeof(std::complex<double>), lim);
  std::vector<CompensatedComplexSum> acc(static_cast<std::size_t>(n_max) + 1);
  const std::int64_t det = form.det_star();
  const std::int64_t ymax = isqrt((form.a * n_max) / det);
  for (std::int64_t y = -ymax; y <= ymax; ++y) {
    // a x^2 + 2 b x y + c y^2 <= n_max  <=>  (a x + b y)^2 <= a n_max - det y^2
    const std::int64_t room = form.a * n_max - det * y * y;
    if (room < 0) continue;
    const std::int64_t w = isqrt(room);
    const double ad = static_cast<double>(form.a), by = static_cast<double>(form.b * y);
    const auto lo = static_cast<std::int64_t>(std::floor((-by - static_cast<double>(w)) / ad)) - 1;
    const auto hi = static_cast<std::int64_t>(std::ceil((-by + static_cast<double>(w)) / ad)) + 1;
    for (std::int64_t x = lo; x <= hi; ++x) {
      const std::int64_t q = form.q_star(x, y);
      if (q < 0 || q > n_max) continue;
      acc[static_cast<std::size_t>(q)].add(
          unit_phase(form.alpha * static_cast<double>(x) + form.beta * static_cast<double>(y)));
    }
  }
  std::vector<std::complex<double>> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<double>(det) * acc[i].value();
  return R2Table::elliptic(form, std::move(out));
}

// r2 or r2* table matching the body's section.
inline R2Table weight_table(const BodyOfRevolution& body, std::int64_t n_max, const CountingLimits& lim = {}) {
  if (body.circular()) return sieve_r2(n_max, lim);
  return sieve_r2_star(std::get<EllipticSection>(body.section()), n_max, lim);
}

// ---------------------------------------------------------------------------
// Slices

namespace detail {

// sup{ s in [0, r_inf^2] : g(sqrt s) >= level }, or nothing if the slice is empty.
inline std::optional<double> squared_slice_radius(const GeneratrixProfile& g, double level) {
  const double top = g.value(0.0);
  if (level > top) return std::nullopt;
  if (level == top) return 0.0;
  const double s_max = g.r_inf() * g.r_inf();
  if (level <= g.value(g.r_inf())) return s_max;
  return bisect_increasing([&g](double s) { return -g.value(std::sqrt(s)); }, -level, 0.0, s_max);
}

// Error bound on a computed squared radius: |dg/ds| >= min|g''| / 2 turns the
// evaluation error of g into an error in s.
inline double slice_s_tolerance(const GeneratrixProfile& g) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double fscale = 1.0 + std::abs(g.value(0.0));
  return 32.0 * eps * fscale / std::min(1.0, g.min_abs_second()) + 8.0 * eps * g.r_inf() * g.r_inf();
}

// #{(x, y) : x^2 + y^2 <= K}
inline std::int64_t disc_count(std::int64_t K) {
  if (K < 0) return 0;
  const std::int64_t X = isqrt(K);
  std::int64_t total = 2 * X + 1;  // x = 0 row
  for (std::int64_t x = 1; x <= X; ++x) total += 2 * (2 * isqrt(K - x * x) + 1);
  return total;
}

// #{(x, y) : c x^2 - 2 b x y + a y^2 <= K}, exact integer arithmetic.
inline std::int64_t ellipse_count_exact(const EllipticSection& e, std::int64_t K) {
  if (K < 0) return 0;
  const std::int64_t det = e.det_star();
  auto form = [&](std::int64_t x, std::int64_t y) { return e.c * x * x - 2 * e.b * x * y + e.a * y * y; };
  // rows in y: need c K - det y^2 >= 0
  const std::int64_t ymax = isqrt((e.c * K) / det);
  std::int64_t total = 0;
  for (std::int64_t y = -ymax; y <= ymax; ++y) {
    const std::int64_t disc = e.c * K - det * y * y;
    if (disc < 0) continue;
    const double sq = std::sqrt(static_cast<double>(disc));
    const double by = static_cast<double>(e.b * y);
    auto lo = static_cast<std::int64_t>(std::ceil((by - sq) / static_cast<double>(e.c)));
    auto hi = static_cast<std::int64_t>(std::floor((by + sq) / static_cast<double>(e.c)));
    while (form(lo - 1, y) <= K) --lo;
    while (lo <= hi && form(lo, y) > K) ++lo;
    while (form(hi + 1, y) <= K) ++hi;
    while (hi >= lo && form(hi, y) > K) --hi;
    if (hi >= lo) total += hi - lo + 1;
  }
  return total;
}

// Shifted ellipse c X^2 - 2 b X Y + a Y^2 <= bound with X = x + sx, Y = y + sy.
inline std::int64_t ellipse_count_shifted(const EllipticSection& e, double bound, double sx, double sy, double tol) {
  if (bound + tol < 0.0) return 0;
  const double det = static_cast<double>(e.det_star());
  const double b = static_cast<double>(e.b), c = static_cast<double>(e.c);
  const double Ymax = std::sqrt(std::max(0.0, c * (bound + tol) / det));
  const auto ylo = static_cast<std::int64_t>(std::ceil(-Ymax - sy));
  const auto yhi = static_cast<std::int64_t>(std::floor(Ymax - sy));
  std::int64_t total = 0;
  for (std::int64_t y = ylo; y <= yhi; ++y) {
    const double Y = static_cast<double>(y) + sy;
    const double disc = c * (bound + tol) - det * Y * Y;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    const double Xlo = (b * Y - sq) / c, Xhi = (b * Y + sq) / c;
    const auto lo = static_cast<std::int64_t>(std::ceil(Xlo - sx));
    const auto hi = static_cast<std::int64_t>(std::floor(Xhi - sx));
    if (hi >= lo) total += hi - lo + 1;
  }
  return total;
}

}  // namespace detail

struct SliceOptions {
  unsigned threads = 0;  // 0: default_thread_count()
  CountingLimits limits{};
};

// N(R) = #{ v in Z^3 : v / R in E }.
inline std::int64_t count_lattice_points(const BodyOfRevolution& body, double R, const SliceOptions& opt = {}) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("R must be positive");
  if (R > opt.limits.max_R)
    throw CapacityError("R = " + std::to_string(R) + " above the counting limit " + std::to_string(opt.limits.max_R));
  const GeneratrixProfile& top = body.upper();
  const GeneratrixProfile& bottom = body.lower_mirror();
  const auto zhi = static_cast<std::int64_t>(std::floor(R * top.value(0.0)));
  const auto zlo = static_cast<std::int64_t>(std::ceil(-R * bottom.value(0.0)));
  if (zhi < zlo) return 0;

  const double R2 = R * R;
  const double tol_s = std::max(detail::slice_s_tolerance(top), detail::slice_s_tolerance(bottom));
  const EllipticSection* ell = std::get_if<EllipticSection>(&body.section());
  const std::size_t n = static_cast<std::size_t>(zhi - zlo + 1);
  std::vector<std::int64_t> per_slice(n, 0);
  parallel_for(n, opt.threads == 0 ? default_thread_count() : opt.threads, [&](std::size_t i) {
    const std::int64_t z = zlo + static_cast<std::int64_t>(i);
    const double t = static_cast<double>(z) / R;
    const auto s1 = detail::squared_slice_radius(top, t);
    const auto s2 = detail::squared_slice_radius(bottom, -t);
    if (!s1 || !s2) return;
    const double B = std::min(*s1, *s2) * R2;
    const double tolB = R2 * tol_s + 8.0 * std::numeric_limits<double>::epsilon() * B;
    if (!ell) {
      per_slice[i] = detail::disc_count(static_cast<std::int64_t>(std::floor(B + tolB)));
    } else {
      const double det = static_cast<double>(ell->det_star());
      if (ell->unshifted())
        per_slice[i] = detail::ellipse_count_exact(*ell, static_cast<std::int64_t>(std::floor(det * (B + tolB))));
      else
        per_slice[i] = detail::ellipse_count_shifted(*ell, det * B, ell->alpha * R, ell->beta * R,
                                                     det * tolB + 1e-12 * (1.0 + det * B));
    }
  });
  std::int64_t total = 0;
  for (auto c : per_slice) total += c;
  return total;
}

// |E| = A * integral_0^r_inf (f1 - f2) 2 r dr, A = pi for circular sections and
// pi sqrt(det Q*) for elliptic ones (the area of {Q <= 1}).
inline double volume(const BodyOfRevolution& body, double rel_tol = 1e-10) {
  const double r_inf = body.r_inf();
  // r = r_inf x keeps the error estimate scale-free
  auto integrand = [&body, r_inf](double x) {
    const double r = r_inf * x;
    return (body.f1(r) - body.f2(r)) * 2.0 * x;
  };
  boost::math::quadrature::tanh_sinh<double> q;
  double err = 0.0, l1 = 0.0;
  const double I = r_inf * r_inf * q.integrate(integrand, 0.0, 1.0, 1e-13, &err, &l1);
  if (!std::isfinite(I) || err > rel_tol * std::max(l1, std::numeric_limits<double>::min()))
    throw QuadratureError("volume integral did not reach relative tolerance " + std::to_string(rel_tol));
  double area = std::numbers::pi;
  if (const auto* e = std::get_if<EllipticSection>(&body.section()))
    area *= std::sqrt(static_cast<double>(e->det_star()));
  return area * I;
}

struct CountRecord {
  double R = 0.0;
  std::int64_t N = 0;
  double volume_term = 0.0;
  double E = 0.0;
};

inline CountRecord make_count_record(double R, std::int64_t N, double vol) {
  CountRecord rec;
  rec.R = R;
  rec.N = N;
  rec.volume_term = R * R * R * vol;
  rec.E = static_cast<double>(N) - rec.volume_term;
  return rec;
}

// One record per grid value, in grid order. `sink` (if set) sees each record
// as soon as it is ready.
inline std::vector<CountRecord> discrepancy_scan(const BodyOfRevolution& body, const std::vector<double>& R_grid,
                                                 const SliceOptions& opt = {},
                                                 const std::function<void(const CountRecord&)>& sink = {}) {
  std::vector<CountRecord> out;
  if (R_grid.empty()) return out;
  const double vol = volume(body);
  out.reserve(R_grid.size());
  for (double R : R_grid) {
    out.push_back(make_count_record(R, count_lattice_points(body, R, opt), vol));
    if (sink) sink(out.back());
  }
  return out;
}

}  // namespace revlat

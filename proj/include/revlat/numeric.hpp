#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "revlat/errors.hpp"

namespace revlat {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// floor(sqrt(n)) for the full uint64 range. The double estimate is off by at
// most a couple of units near 2^64, so the correction loops are short.
inline std::uint64_t isqrt(std::uint64_t n) {
  if (n < 2) return n;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  // r*r may overflow when r is rounded up to 2^32
  while (r > 0xFFFFFFFFull || r * r > n) --r;
  while (r < 0xFFFFFFFFull && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw DomainError("isqrt of negative integer " + std::to_string(n));
  return static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(n)));
}

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

// e(t) = exp(2 pi i t), reducing t modulo 1 first so large phases keep their
// fractional precision.
inline std::complex<double> unit_phase(double t) {
  const double frac = t - std::nearbyint(t);
  return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

inline double dist_to_integer(double x) { return std::abs(x - std::nearbyint(x)); }

// Least-squares line through (x, y). Returns slope, intercept and the standard
// error of the slope.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InsufficientDataError("line fit needs at least two points");
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (sxx.value() == 0.0) throw InsufficientDataError("line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    CompensatedSum rss;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      rss.add(r * r);
    }
    fit.slope_stderr = std::sqrt(rss.value() / static_cast<double>(n - 2) / sxx.value());
  }
  return fit;
}

// Slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly).slope;
}

// Default worker count: REVLAT_THREADS if set, otherwise the hardware count.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("REVLAT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs body(i) for i in [0, n) on up to `threads` workers with a static
// interleaved schedule. Results must be written to per-index slots; any
// reduction happens afterwards in index order, so output never depends on the
// thread count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Solves g(x) = target for increasing g on [lo, hi] by bisection down to
// adjacent doubles. g is never evaluated at hi, so hi may be a singular point.
template <class G>
double bisect_increasing(G&& g, double target, double lo, double hi, int max_iter = 1200) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace revlat

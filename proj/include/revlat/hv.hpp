#pragma once

// Truncated Hardy-Voronoi sum
//
//   E(R') ~ -(R'/pi) sum_{v != 0} eta(delta |v|) cos(2 pi R' g(v)) / (|v|^2 sqrt(kappa(v)))
//
// grouped by v = (x, y, m) with n = x^2 + y^2, so each (n, m) shell carries the
// multiplicity r2(n), the phase R' h(n, m) and the curvature at the boundary
// point with normal (sqrt n, 0, m).
//
// eta is the radial self-convolution in R^3 of the bump b(r) = exp(-1/(1-(r/w)^2)),
// normalized to eta(0) = 1. A 3D self-convolution has Fourier transform
// |b^|^2 >= 0, which is the property the formula needs. For radial b,
//
//   (b*b)(t) = (2 pi / t) int_0^w r b(r) [G(r + t) - G(|r - t|)] dr,
//   G(x) = int_0^min(x, w) s b(s) ds,
//
// and (b*b)(0) = 4 pi int_0^w r^2 b(r)^2 dr.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "revlat/counting.hpp"
#include "revlat/errors.hpp"
#include "revlat/geometry.hpp"
#include "revlat/numeric.hpp"

namespace revlat {

class EtaCutoff {
 public:
  static constexpr int kDefaultSamples = 1 << 14;

  explicit EtaCutoff(double half_width = 0.5, int samples = kDefaultSamples) : w_(half_width) {
    if (!(half_width > 0.0 && half_width <= 0.5)) throw ValidationError("eta half-width must lie in (0, 1/2]");
    if (samples < 64) throw ValidationError("eta needs at least 64 samples");
    build(samples);
  }

  double half_width() const { return w_; }
  double support() const { return 2.0 * w_; }
  // (b*b)(0) before normalization
  double normalization() const { return norm_; }
  const std::vector<double>& samples() const { return table_; }

  double operator()(double t) const {
    const double a = std::abs(t);
    if (a >= support()) return 0.0;
    return std::max(0.0, (*spline_)(a));
  }

  // The base bump b.
  double bump(double r) const {
    const double x = r / w_;
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
  }

 private:
  void build(int samples) {
    using boost::math::quadrature::gauss;
    // G on a fine grid, Hermite-interpolated with its exact derivative s b(s).
    const int ng = samples;
    std::vector<double> gx(static_cast<std::size_t>(ng) + 1), gy(gx.size()), gd(gx.size());
    double acc = 0.0;
    for (int i = 0; i <= ng; ++i) {
      const double x = w_ * i / ng;
      if (i > 0) acc += gauss<double, 10>::integrate([this](double s) { return s * bump(s); }, gx[i - 1], x);
      gx[i] = x;
      gy[i] = acc;
      gd[i] = x * bump(x);
    }
    const double g_top = acc;
    boost::math::interpolators::cubic_hermite<std::vector<double>> G(std::move(gx), std::move(gy), std::move(gd));
    auto Gc = [&](double x) { return x >= w_ ? g_top : G(x); };

    const int pieces = 32;
    auto outer = [&](auto&& integrand) {
      double s = 0.0;
      for (int k = 0; k < pieces; ++k)
        s += gauss<double, 20>::integrate(integrand, w_ * k / pieces, w_ * (k + 1) / pieces);
      return s;
    };
    norm_ = 4.0 * std::numbers::pi * outer([this](double r) {
              const double b = bump(r);
              return r * r * b * b;
            });

    table_.assign(static_cast<std::size_t>(samples) + 1, 0.0);
    const double h = support() / samples;
    table_[0] = 1.0;
    for (int i = 1; i < samples; ++i) {
      const double t = h * i;
      const double v = outer([&](double r) { return r * bump(r) * (Gc(r + t) - Gc(std::abs(r - t))); });
      table_[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * v / t / norm_;
    }
    table_.back() = 0.0;
    spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        table_.begin(), table_.end(), 0.0, h, 0.0, 0.0);
  }

  double w_;
  double norm_ = 0.0;
  std::vector<double> table_;
  std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

inline EtaCutoff build_eta(double half_width = 0.5) { return EtaCutoff(half_width); }

// 3D Fourier transform of eta(|x|) at radial frequency k:
// (4 pi / k) int_0^{2w} r eta(r) sin(2 pi k r) dr, with the 2 pi in the exponent.
inline double eta_radial_transform(const EtaCutoff& eta, double k) {
  using boost::math::quadrature::gauss;
  const double L = eta.support();
  const int pieces = std::max(64, static_cast<int>(8.0 * k * L) + 64);
  double s = 0.0;
  if (k == 0.0) {
    for (int i = 0; i < pieces; ++i)
      s += gauss<double, 20>::integrate([&](double r) { return r * r * eta(r); }, L * i / pieces, L * (i + 1) / pieces);
    return 4.0 * std::numbers::pi * s;
  }
  const double w = kTwoPi * k;
  for (int i = 0; i < pieces; ++i)
    s += gauss<double, 20>::integrate([&](double r) { return r * eta(r) * std::sin(w * r); }, L * i / pieces,
                                      L * (i + 1) / pieces);
  return 2.0 * s / k;
}

// One (n, m) shell of the frequency sum.
struct HvTerm {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t multiplicity = 0;  // r2(n)
  double weight = 0.0;            // r2(n) eta(delta |v|) / (|v|^2 sqrt kappa)
  double phase = 0.0;             // g(v) = h(n, m)
};

struct HvOptions {
  unsigned threads = 0;
  std::size_t chunk = 4096;
};

class HvTermTable {
 public:
  HvTermTable(const BodyOfRevolution& body, double delta, const EtaCutoff& eta) : delta_(delta) {
    if (!body.circular()) throw DomainError("the Hardy-Voronoi sum is implemented for circular sections only");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    const double cutoff = 1.0 / (delta * delta);  // n + m^2 < delta^-2
    if (cutoff > 1e9) throw CapacityError("delta too small: frequency range above 1e9");
    const auto N = static_cast<std::int64_t>(std::ceil(cutoff));
    const R2Table r2 = sieve_r2(std::max<std::int64_t>(N, 1));
    const bool regular_equator = body.upper().vertical_equator() && body.lower_mirror().vertical_equator();
    double equator_kappa = 0.0;
    if (regular_equator) equator_kappa = equatorial_curvatures(body.upper()).gaussian();

    const auto Mmax = static_cast<std::int64_t>(std::floor(std::sqrt(cutoff)));
    for (std::int64_t m = -Mmax; m <= Mmax; ++m) {
      for (std::int64_t n = 0; static_cast<double>(n + m * m) < cutoff; ++n) {
        if (n == 0 && m == 0) continue;
        const std::int64_t mult = r2.count(n);
        if (mult == 0) continue;
        const double norm2 = static_cast<double>(n + m * m);
        const double cut = eta(delta * std::sqrt(norm2));
        if (cut == 0.0) continue;
        HvTerm t;
        t.n = n;
        t.m = m;
        t.multiplicity = mult;
        double kappa = 0.0;
        if (m == 0) {
          if (!regular_equator) {
            dropped_equator_ += mult;
            continue;
          }
          t.phase = body.r_inf() * std::sqrt(static_cast<double>(n));
          kappa = equator_kappa;
        } else {
          const GeneratrixProfile& cap = body.cap(static_cast<double>(m));
          const double am = std::abs(static_cast<double>(m));
          const double slope = std::sqrt(static_cast<double>(n)) / am;
          if (!(slope < cap.slope_sup())) {
            dropped_edge_ += mult;  // normal attained only on the equatorial edge
            continue;
          }
          const double rs = phi(cap, slope);
          t.phase = std::sqrt(static_cast<double>(n)) * rs + am * cap.value(rs);
          kappa = principal_curvatures(cap, rs).gaussian();
        }
        t.weight = static_cast<double>(mult) * cut / (norm2 * std::sqrt(kappa));
        terms_.push_back(t);
      }
    }
    // fixed order: |v|^2, then n, then m
    std::sort(terms_.begin(), terms_.end(), [](const HvTerm& a, const HvTerm& b) {
      const auto na = a.n + a.m * a.m, nb = b.n + b.m * b.m;
      if (na != nb) return na < nb;
      if (a.n != b.n) return a.n < b.n;
      return a.m < b.m;
    });
  }

  double delta() const { return delta_; }
  const std::vector<HvTerm>& terms() const { return terms_; }
  // Lattice vectors (not shells) left out of the sum.
  std::int64_t dropped_edge() const { return dropped_edge_; }
  std::int64_t dropped_equator() const { return dropped_equator_; }

  // -(R'/pi) sum weight cos(2 pi R' phase), chunked with compensated sums and
  // chunk totals combined in order.
  double evaluate(double R_prime, const HvOptions& opt = {}) const {
    const std::size_t chunk = std::max<std::size_t>(1, opt.chunk);
    const std::size_t nchunks = (terms_.size() + chunk - 1) / chunk;
    std::vector<double> part(nchunks, 0.0);
    parallel_for(nchunks, opt.threads == 0 ? default_thread_count() : opt.threads, [&](std::size_t c) {
      CompensatedSum s;
      const std::size_t hi = std::min(terms_.size(), (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < hi; ++i) s.add(terms_[i].weight * unit_phase(R_prime * terms_[i].phase).real());
      part[c] = s.value();
    });
    CompensatedSum total;
    for (double p : part) total.add(p);
    return -R_prime / std::numbers::pi * total.value();
  }

 private:
  double delta_;
  std::vector<HvTerm> terms_;
  std::int64_t dropped_edge_ = 0;
  std::int64_t dropped_equator_ = 0;
};

inline double hv_sum(const BodyOfRevolution& body, double R_prime, double delta, const EtaCutoff& eta,
                     const HvOptions& opt = {}) {
  if (!(R_prime > 2.0)) throw ValidationError("R' must exceed 2");
  if (delta >= 1.0) return 0.0;  // no nonzero frequency has |v| < 1/delta
  return HvTermTable(body, delta, eta).evaluate(R_prime, opt);
}

inline double default_delta(double R) { return std::pow(R, -5.0 / 8.0); }

struct HvRow {
  double R_prime = 0.0;
  double E = 0.0;
  double hv = 0.0;
  double residual = 0.0;
};

struct HvScan {
  std::vector<HvRow> rows;
  std::size_t best = 0;  // index of the smallest residual
  double min_residual = 0.0;
  double median_residual = 0.0;
  std::int64_t dropped_edge = 0;
  std::int64_t dropped_equator = 0;
};

// R' on the midpoints of grid_size equal cells of (R - 2, R + 2).
inline HvScan scan_R_prime(const BodyOfRevolution& body, double R, double delta, int grid_size,
                           const EtaCutoff& eta, const HvOptions& opt = {}, const SliceOptions& count_opt = {}) {
  if (grid_size < 1) throw ValidationError("grid size must be positive");
  if (!(R - 2.0 >= 2.0)) throw ValidationError("R' grid must stay above 2 (R >= 4)");
  const HvTermTable table(body, delta, eta);
  const double vol = volume(body);
  HvScan out;
  out.dropped_edge = table.dropped_edge();
  out.dropped_equator = table.dropped_equator();
  for (int i = 0; i < grid_size; ++i) {
    HvRow row;
    row.R_prime = R - 2.0 + 4.0 * (i + 0.5) / grid_size;
    row.E = make_count_record(row.R_prime, count_lattice_points(body, row.R_prime, count_opt), vol).E;
    row.hv = table.evaluate(row.R_prime, opt);
    row.residual = std::abs(row.E - row.hv);
    out.rows.push_back(row);
  }
  std::vector<double> res;
  for (const auto& r : out.rows) res.push_back(r.residual);
  out.best = static_cast<std::size_t>(std::min_element(res.begin(), res.end()) - res.begin());
  out.min_residual = res[out.best];
  std::sort(res.begin(), res.end());
  const std::size_t k = res.size();
  out.median_residual = k % 2 ? res[k / 2] : 0.5 * (res[k / 2 - 1] + res[k / 2]);
  return out;
}

}  // namespace revlat

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "revlat/errors.hpp"
#include "revlat/geometry.hpp"

namespace revlat {

// Dense polynomial sum_k c_k r^k with derivatives of any order.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
  }

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  double derivative(int k, double r) const {
    if (k < 0) throw DomainError("negative derivative order");
    double acc = 0.0;
    for (int i = degree(); i >= k; --i) {
      double falling = 1.0;
      for (int j = 0; j < k; ++j) falling *= static_cast<double>(i - j);
      acc = acc * r + c_[static_cast<std::size_t>(i)] * falling;
    }
    return acc;
  }
  double operator()(double r) const { return derivative(0, r); }

 private:
  std::vector<double> c_;
};

// Cap of a ball of radius rho: f(r) = sqrt(rho^2 - r^2).
inline GeneratrixProfile sphere_cap(double rho = 1.0) {
  const double rr = rho * rho;
  GeneratrixProfile::Evaluators ev;
  ev.f = [rr](double r) { return std::sqrt(rr - r * r); };
  ev.d1 = [rr](double r) { return -r / std::sqrt(rr - r * r); };
  ev.d2 = [rr](double r) {
    const double w = rr - r * r;
    return -rr / (w * std::sqrt(w));
  };
  ev.d3 = [rr](double r) {
    const double w = rr - r * r;
    return -3.0 * rr * r / (w * w * std::sqrt(w));
  };
  ev.d4 = [rr](double r) {
    const double w = rr - r * r;
    return -3.0 * rr * (w + 5.0 * r * r) / (w * w * w * std::sqrt(w));
  };
  return GeneratrixProfile(std::move(ev), rho);
}

inline GeneratrixProfile polynomial_cap(const Polynomial& poly, double r_inf) {
  GeneratrixProfile::Evaluators ev;
  ev.f = [poly](double r) { return poly.derivative(0, r); };
  ev.d1 = [poly](double r) { return poly.derivative(1, r); };
  ev.d2 = [poly](double r) { return poly.derivative(2, r); };
  ev.d3 = [poly](double r) { return poly.derivative(3, r); };
  ev.d4 = [poly](double r) { return poly.derivative(4, r); };
  ev.higher = [poly](int k, double r) { return poly.derivative(k, r); };
  ev.higher_max_order = 64;
  return GeneratrixProfile(std::move(ev), r_inf);
}

// First positive zero of a cap that decreases from f(0) > 0.
inline double first_positive_root(const Polynomial& poly) {
  if (!(poly(0.0) > 0.0)) throw ValidationError("cap must be positive on the axis");
  double hi = 1.0;
  int guard = 0;
  while (poly(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw ValidationError("cap never crosses zero");
  }
  return bisect_increasing([&poly](double r) { return -poly(r); }, 0.0, 0.0, hi);
}

// Body symmetric under z -> -z with upper cap `upper`.
inline BodyOfRevolution mirrored_body(const GeneratrixProfile& upper, Section section = CircularSection{},
                                      EquatorCheck check = EquatorCheck::enforce) {
  return BodyOfRevolution(upper, upper, section, check);
}

inline BodyOfRevolution unit_ball() { return mirrored_body(sphere_cap(1.0)); }

// f(r) = 1 - a r^2 - c r^p; c = 0 gives the parabolic cap.
inline Polynomial perturbed_parabola(double a = 0.5, double c = 1.0, int power = 6) {
  if (power < 4 || power % 2 != 0) throw ValidationError("perturbation power must be even and >= 4");
  std::vector<double> coeffs(static_cast<std::size_t>(power) + 1, 0.0);
  coeffs[0] = 1.0;
  coeffs[2] = -a;
  coeffs[static_cast<std::size_t>(power)] -= c;
  return Polynomial(coeffs);
}

// Lens {|z| <= f(r)} for a polynomial cap, closed at the first zero of f.
inline BodyOfRevolution polynomial_lens(const Polynomial& poly, Section section = CircularSection{}) {
  return mirrored_body(polynomial_cap(poly, first_positive_root(poly)), section);
}

inline BodyOfRevolution parabolic_body() { return polynomial_lens(perturbed_parabola(0.5, 0.0)); }
inline BodyOfRevolution perturbed_body() { return polynomial_lens(perturbed_parabola(0.5, 1.0, 6)); }

}  // namespace revlat

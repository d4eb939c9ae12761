#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "revlat/analysis.hpp"
#include "revlat/profiles.hpp"

using namespace revlat;

namespace {

std::vector<CountRecord> synthetic(double (*E)(double, int), int n = 40) {
  std::vector<CountRecord> out;
  for (int i = 0; i < n; ++i) {
    CountRecord r;
    r.R = 10.0 * std::pow(1.1, i);
    r.E = E(r.R, i);
    out.push_back(r);
  }
  return out;
}

// Closed forms for the unit ball, h(n, m) = sqrt(n + m^2).
double ball_h(double n, double m) { return std::sqrt(n + m * m); }
double ball_hn(double n, double m) { return 0.5 / std::sqrt(n + m * m); }
double ball_hnnm(double n, double m) { return 0.75 * m * std::pow(n + m * m, -2.5); }
double ball_hnmm(double n, double m) {
  const double s = n + m * m;
  return -0.5 * std::pow(s, -1.5) + 1.5 * m * m * std::pow(s, -2.5);
}

double param(const RatioPoint& p, const std::string& key) {
  for (const auto& [k, v] : p.params)
    if (k == key) return v;
  ADD_FAILURE() << "missing param " << key;
  return 0.0;
}

RatioPoint pt(double scale, double ratio) { return {scale, ratio, 1.0, ratio, {}}; }

}  // namespace

TEST(FitAlpha, PowerLawRecovered) {
  const auto f = fit_alpha(synthetic([](double R, int) { return std::pow(R, 1.25); }));
  EXPECT_NEAR(f.alpha_hat, 1.25, 1e-10);
  EXPECT_EQ(f.n_points, 40u);
  EXPECT_EQ(f.residuals.size(), 40u);
  for (double r : f.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(FitAlpha, ConstantGivesZero) {
  EXPECT_NEAR(fit_alpha(synthetic([](double, int) { return -3.0; })).alpha_hat, 0.0, 1e-12);
}

TEST(FitAlpha, UsesRunningMaximum) {
  // sign flips and deep dips between envelope points do not change the fit
  const auto spiky = fit_alpha(synthetic([](double R, int i) { return i % 2 ? 1e-6 : -std::pow(R, 1.25); }));
  const auto dipped = fit_alpha(synthetic([](double R, int i) { return i % 2 ? 3e-4 : std::pow(R, 1.25); }));
  EXPECT_NEAR(spiky.alpha_hat, dipped.alpha_hat, 1e-12);
  EXPECT_NEAR(spiky.alpha_hat, 1.25, 0.05);
}

TEST(FitAlpha, Preconditions) {
  EXPECT_THROW(fit_alpha(synthetic([](double R, int) { return R; }, 7)), InsufficientDataError);
  auto eight = synthetic([](double R, int) { return R; }, 8);
  EXPECT_NO_THROW(fit_alpha(eight));
  eight[3].E = 0.0;  // zeros are dropped before counting
  EXPECT_THROW(fit_alpha(eight), InsufficientDataError);
  auto dup = synthetic([](double R, int) { return R; }, 10);
  dup[4].R = dup[5].R;
  EXPECT_THROW(fit_alpha(dup), ValidationError);
}

TEST(Registry, IdsAreUniqueAndResolvable) {
  std::set<std::string> ids;
  for (const auto& c : claim_registry()) {
    EXPECT_TRUE(ids.insert(c.id).second) << c.id;
    EXPECT_EQ(&find_claim(c.id), &c);
    EXPECT_FALSE(c.statement.empty());
  }
  EXPECT_EQ(ids.size(), 13u);
}

TEST(Registry, UnknownIdRejected) {
  EXPECT_THROW(find_claim("prop3"), ValidationError);
  EXPECT_THROW(ratio_harness("lemma-7", unit_ball()), ValidationError);
  EXPECT_THROW(ratio_harness("", unit_ball()), ValidationError);
}

TEST(Summarize, SinglePoint) {
  const auto rep = summarize(find_claim("weyl-step"), {pt(128.0, 0.3)});
  EXPECT_EQ(rep.min, rep.max);
  EXPECT_EQ(rep.min, 0.3);
  EXPECT_FALSE(rep.pass);  // one scale gives no slope
  EXPECT_TRUE(std::isnan(rep.slope));
}

TEST(Summarize, SlopeOfPerScaleMaximum) {
  const auto& info = find_claim("weyl-step");
  std::vector<RatioPoint> flat, rising;
  for (double s : {64.0, 128.0, 256.0, 512.0}) {
    flat.push_back(pt(s, 2.0));
    flat.push_back(pt(s, 0.001 * s));  // small values do not matter
    rising.push_back(pt(s, std::pow(s, 0.1)));
  }
  const auto a = summarize(info, flat);
  EXPECT_NEAR(a.slope, 0.0, 1e-12);
  EXPECT_TRUE(a.pass);
  ASSERT_EQ(a.level_max.size(), 4u);
  const auto b = summarize(info, rising);
  EXPECT_NEAR(b.slope, 0.1, 1e-12);
  EXPECT_FALSE(b.pass);
}

TEST(Summarize, TwoSidedNeedsStableMinimum) {
  const auto& info = find_claim("mixed-nnm");
  std::vector<RatioPoint> pts;
  for (double s : {1.0, 2.0, 4.0, 8.0}) {
    pts.push_back(pt(s, 1.0));
    pts.push_back(pt(s, 1.0 / s));
  }
  const auto rep = summarize(info, pts);
  EXPECT_NEAR(rep.slope_min, -1.0, 1e-12);
  EXPECT_FALSE(rep.pass);
  pts.push_back(pt(2.0, 0.0));
  EXPECT_FALSE(summarize(info, pts).pass);
}

TEST(Summarize, FinestHalf) {
  const auto& info = find_claim("shift-linear");
  std::vector<RatioPoint> pts;
  for (int k = 0; k < 8; ++k) pts.push_back(pt(std::ldexp(1.0, k), k < 4 ? std::ldexp(1.0, k) : 8.0));
  EXPECT_FALSE(summarize(info, pts).pass);
  const auto rep = summarize(info, pts, {}, true);
  EXPECT_NEAR(rep.slope, 0.0, 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.scales.size(), 8u);
}

TEST(Claims, SphereFPrimeIsExactlyHalf) {
  const auto rep = ratio_harness("fprime-decay", unit_ball());
  ASSERT_FALSE(rep.points.empty());
  for (const auto& p : rep.points) EXPECT_NEAR(p.ratio, 0.5, 1e-8) << param(p, "u");
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.spread_change, 0.05);
}

TEST(Claims, ShiftLinearMatchesClosedForm) {
  ClaimGrid g;
  g.levels = 4;
  g.j = {0};
  const auto rep = ratio_harness("shift-linear", unit_ball(), g);
  ASSERT_FALSE(rep.points.empty());
  EXPECT_NEAR(F_prime(sphere_cap(), 0.0), -0.5, 1e-14);
  for (const auto& p : rep.points) {
    const double u = param(p, "u"), m = param(p, "m"), l = param(p, "l");
    const double n = u * m * m;
    const double lhs = std::abs(ball_hn(n, m + l) - ball_hn(n, m) + 0.5 * l / (m * (m + l)));
    EXPECT_NEAR(p.lhs, lhs, 1e-12 * ball_hn(n, m)) << u << " " << m << " " << l;
    EXPECT_LE(l, u * param(p, "M"));
  }
}

TEST(Claims, SecondDerivativeSumMatchesDirectSum) {
  ClaimGrid g;
  g.R = {64.0, 128.0};
  g.j = {0};
  const auto rep = ratio_harness("second-derivative-sum", unit_ball(), g);
  ASSERT_FALSE(rep.points.empty());
  for (const auto& p : rep.points) {
    const double U1 = param(p, "U1"), U2 = param(p, "U2"), m = param(p, "m"), l = param(p, "l");
    std::complex<double> s = 0.0;
    for (std::int64_t n = 0; static_cast<double>(n) < U2 * m * m; ++n) {
      const double dn = static_cast<double>(n);
      if (dn / ((m + l) * (m + l)) < U1) continue;
      const double t = p.scale * (ball_h(dn, m + l) - ball_h(dn, m));
      s += std::polar(1.0, 2.0 * std::numbers::pi * t);
    }
    EXPECT_NEAR(p.lhs, std::abs(s), 1e-8 * (1.0 + std::abs(s)));
    EXPECT_GE(param(p, "U2") - param(p, "U1"), 0.0);
    EXPECT_GE((U2 - U1) * param(p, "M"), std::pow(p.scale, 0.375));
  }
}

TEST(Claims, StepDominanceAgainstClosedForm) {
  const auto body = unit_ball();
  for (double M : {20.0, 200.0})
    for (double UM : {0.1, 0.3, 0.6, 1.0}) {
      BlockSpec b;
      b.M = static_cast<std::int64_t>(M);
      b.U = UM / M;
      b.U1 = b.U;
      b.U2 = 2.0 * b.U;
      double worst = 0.0;
      for (double m : {M, 2.0 * M})
        for (int i = 0; i <= 4; ++i) {
          const double n = (b.U1 + b.U * i / 4.0) * m * m;
          worst = std::max(worst, b.U * m * m * ball_hnnm(n, m) / std::abs(ball_hnmm(n, m)));
        }
      for (double allowed : {0.25, 0.5, 0.9})
        if (std::abs(worst - allowed) > 1e-6)
          EXPECT_EQ(detail::step_sign_fixed(body, b, allowed), worst <= allowed) << M << " " << UM << " " << allowed;
    }
}

TEST(Claims, SphereHasNoAdmissibleSpacingBlocks) {
  // d = 0 forces U M >= l >= 1, where the drift is at least 3/4 of the step
  const auto rep = ratio_harness("phase-count-spacing", unit_ball());
  EXPECT_TRUE(rep.points.empty());
  EXPECT_FALSE(rep.pass);
  EXPECT_NE(rep.note.find("hypotheses"), std::string::npos);
}

TEST(Claims, PhaseCountsAreBoundedByBlockSize) {
  ClaimGrid g;
  g.R = {64.0, 256.0};
  const auto rep = ratio_harness("phase-count-divisor", perturbed_body(), g);
  ASSERT_FALSE(rep.points.empty());
  for (const auto& p : rep.points) {
    EXPECT_LE(p.lhs, param(p, "M"));
    EXPECT_EQ(p.lhs, std::floor(p.lhs));
    if (param(p, "x") == 0.5) EXPECT_GT(p.lhs, 0.0);  // every Phi lies in [0, 1/2]
  }
}

TEST(Claims, Hypotheses) {
  ClaimGrid g;
  g.j = {-1};
  EXPECT_THROW(ratio_harness("fsecond-order", perturbed_body(), g), HypothesisError);  // lens edge
  EXPECT_THROW(ratio_harness("shift-linear", unit_ball(), g), HypothesisError);
  g.j = {7};
  EXPECT_THROW(ratio_harness("mixed-nnm", unit_ball(), g), HypothesisError);
  g.j = {1};  // d = 0 away from u = 0
  EXPECT_THROW(ratio_harness("mixed-nmm", unit_ball(), g), HypothesisError);

  ClaimGrid off;
  off.offsets = {0.5};
  EXPECT_THROW(ratio_harness("fsecond-order", unit_ball(), off), HypothesisError);
  ClaimGrid x;
  x.x = {0.7};
  EXPECT_THROW(ratio_harness("phase-count-divisor", unit_ball(), x), HypothesisError);
  ClaimGrid ell;
  ell.ell = {100000};
  EXPECT_THROW(ratio_harness("shift-linear", perturbed_body(), ell), HypothesisError);
  ClaimGrid M0;
  M0.M = {0};
  EXPECT_THROW(ratio_harness("mixed-nnm", unit_ball(), M0), HypothesisError);
  ClaimGrid big;
  big.M = {64};
  EXPECT_THROW(ratio_harness("weyl-step", unit_ball(), big), HypothesisError);
  ClaimGrid drift;
  drift.drift = 1.5;
  EXPECT_THROW(ratio_harness("phase-count-spacing", perturbed_body(), drift), HypothesisError);
  ClaimGrid R1;
  R1.R = {1.0};
  EXPECT_THROW(ratio_harness("block-bound", unit_ball(), R1), HypothesisError);
  ClaimGrid frac;
  frac.M_fraction = {0.75};
  EXPECT_THROW(ratio_harness("second-derivative-sum", unit_ball(), frac), HypothesisError);
}

TEST(Claims, CommonShapesKeepsTagsPresentAtEveryR) {
  auto make = [](double R) {
    std::vector<detail::Shape> v;
    v.push_back({"a", {}, 0.0, 1});
    if (R > 100.0) v.push_back({"b", {}, 0.0, 1});
    return v;
  };
  const auto all = detail::common_shapes(std::vector<double>{64.0, 128.0, 256.0}, make);
  ASSERT_EQ(all.size(), 3u);
  for (const auto& [R, shapes] : all) {
    ASSERT_EQ(shapes.size(), 1u) << R;
    EXPECT_EQ(shapes[0].tag, "a");
  }
}

TEST(TheoremSuite, SmallRIsBoundedByTrivialWeights) {
  const auto body = unit_ball();
  const auto bp = find_breakpoints(body.upper());
  const std::vector<double> Rs = {3.0, 4.0, 5.0};
  const auto suite = theorem_suite(body, Rs);
  ASSERT_EQ(suite.rows.size(), 3u);
  for (const auto& row : suite.rows) {
    const auto split = dyadic_split(bp, row.delta, row.R);
    const auto table = weight_table(body, static_cast<std::int64_t>(std::ceil(split.norm_cap)));
    double best = 0.0, trivial = 0.0;
    for (const auto& b : split.blocks) {
      if (b.side == BlockSide::tail) continue;
      const auto r = block_sum(body, b, table);
      EXPECT_LE(std::abs(r.value), r.weight_abs * (1.0 + 1e-12));
      best = std::max(best, r.bound_ratio);
      trivial = std::max(trivial, r.weight_abs / block_target(b));
    }
    EXPECT_EQ(row.max_block, best);
    EXPECT_LE(row.max_block, trivial * (1.0 + 1e-12));
  }
  EXPECT_THROW(theorem_suite(body, {}), HypothesisError);
}

TEST(TheoremSuite, BothBodiesStable) {
  for (const auto& body : {unit_ball(), perturbed_body()}) {
    const auto s = theorem_suite(body, {64.0, 128.0, 256.0, 512.0});
    EXPECT_TRUE(s.pass_block) << s.slope_block;
    EXPECT_TRUE(s.pass_tail) << s.slope_tail;
    for (const auto& r : s.rows) EXPECT_GT(r.blocks, 0u);
  }
}

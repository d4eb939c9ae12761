// Acceptance suite: one PASS/FAIL line per criterion. An optional argument
// restricts the run to criteria whose label contains it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "revlat/analysis.hpp"
#include "revlat/cli.hpp"
#include "revlat/counting.hpp"
#include "revlat/expsum.hpp"
#include "revlat/geometry.hpp"
#include "revlat/hv.hpp"
#include "revlat/profiles.hpp"

using namespace revlat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Fourth-order central difference.
template <class G>
double diff(G&& g, double x, double h) {
  return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h);
}

BodyOfRevolution elliptic_ball() { return mirrored_body(sphere_cap(), EllipticSection{2, 1, 3, 0.25, -1.0 / 3.0}); }
BodyOfRevolution wavy_body() { return polynomial_lens(Polynomial({1.0, 0.0, -0.5, 0.0, 0.3, 0.0, -1.0})); }

struct Named {
  std::string name;
  BodyOfRevolution body;
};

std::vector<Named> model_bodies() { return {{"sphere", unit_ball()}, {"perturbed", perturbed_body()}}; }

// ---------------------------------------------------------------------------

Outcome exact_counts() {
  const auto ball = unit_ball(), par = parabolic_body(), pert = perturbed_body(), ell = elliptic_ball();
  const oracle::EllipseSpec es{2, 1, 3, 1, 4, -1, 3};
  int checked = 0;
  for (std::int64_t P = 1; P <= 60; ++P) {
    const oracle::Dilation R{P, 2};
    const double r = R.value();
    const std::pair<std::int64_t, std::int64_t> cases[] = {
        {count_lattice_points(ball, r), oracle::ball(R)},
        {count_lattice_points(par, r), oracle::poly_lens(R, 0)},
        {count_lattice_points(pert, r), oracle::poly_lens(R, 1)},
        {count_lattice_points(ell, r), oracle::elliptic_ball(R, es)},
    };
    for (const auto& [got, want] : cases) {
      if (got != want)
        return {false, "R=" + fmt(r) + " count " + std::to_string(got) + " != " + std::to_string(want)};
      ++checked;
    }
  }
  return {true, std::to_string(checked) + " counts, R = 0.5 .. 30"};
}

Outcome gauss_circle() {
  const std::int64_t N = 100000;
  const auto t = sieve_r2(N);
  std::int64_t sum = 0;
  for (std::int64_t n = 0; n <= N; ++n) sum += t.count(n);
  std::int64_t disc = 0;
  for (std::int64_t x = -317; x <= 317; ++x)
    for (std::int64_t y = -317; y <= 317; ++y)
      if (x * x + y * y <= N) ++disc;
  return {sum == disc, "sum r2 = " + std::to_string(sum) + ", disc = " + std::to_string(disc)};
}

Outcome sphere_closed_forms() {
  const auto ball = unit_ball();
  const auto& cap = ball.upper();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double n = std::pow(10.0, -3.0 + 7.0 * unit(rng));
    const double m = std::pow(10.0, -1.0 + 3.0 * unit(rng));
    const double u = std::pow(10.0, -4.0 + 8.0 * unit(rng));
    const double r = 0.99 * unit(rng);
    double dir[3];
    do {
      std::normal_distribution<double> g;
      for (double& c : dir) c = g(rng);
      const double len = std::hypot(dir[0], dir[1], dir[2]);
      for (double& c : dir) c /= len;
    } while (std::abs(dir[2]) < 1e-3);
    worst = std::max({worst, rel(support_h(ball, n, m), std::sqrt(n + m * m)),
                      rel(big_F(cap, u), 1.0 / std::sqrt(1.0 + u)), rel(generatrix_curvature(cap, r), -1.0),
                      rel(gaussian_curvature(ball, {dir[0], dir[1], dir[2]}), 1.0)});
  }
  return {worst <= 1e-10, "max relative error " + fmt(worst)};
}

Outcome dm_equals_F() {
  const std::vector<Named> bodies = {{"sphere", unit_ball()},
                                     {"parabolic", parabolic_body()},
                                     {"perturbed", perturbed_body()},
                                     {"wavy", wavy_body()},
                                     {"elliptic", elliptic_ball()}};
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_F = 0.0, worst_fd = 0.0;
  for (const auto& [name, b] : bodies) {
    const auto& cap = b.upper();
    const double usup = std::min(cap.slope_sup() * cap.slope_sup(), 1e4);
    for (int i = 0; i < 200; ++i) {
      const double u = 0.8 * usup * std::pow(10.0, -4.0 * unit(rng));
      const double m = 1.0 + 19.0 * unit(rng);
      const double n = u * m * m;
      const double hm = h_partial(b, n, m, Partial::m);
      worst_F = std::max(worst_F, rel(hm, big_F(cap, n / (m * m))));
      worst_fd = std::max(worst_fd, rel(hm, diff([&](double mm) { return support_h(b, n, mm); }, m, 1e-4 * m)));
    }
  }
  return {worst_F <= 1e-10 && worst_fd <= 1e-6,
          "vs F " + fmt(worst_F) + ", vs differences " + fmt(worst_fd) + " over 5 bodies"};
}

Outcome hv_agreement() {
  std::string detail;
  bool pass = true;
  const EtaCutoff eta;
  for (const auto& [name, b] : model_bodies()) {
    std::map<double, double> stat;
    for (double R : {40.0, 80.0}) {
      const double delta = default_delta(R);
      const auto s = scan_R_prime(b, R, delta, 64, eta);
      stat[R] = s.min_residual / (R * R * delta);
    }
    const double growth = stat[80.0] / stat[40.0];
    pass = pass && growth <= 1.5;
    detail += name + ": " + fmt(stat[40.0]) + " -> " + fmt(stat[80.0]) + " (x" + fmt(growth, 3) + ")  ";
  }
  return {pass, detail};
}

Outcome first_derivative_test() {
  std::mt19937_64 rng(13);
  int checked = 0, skipped_monotone = 0;
  double worst = 0.0;
  for (const auto& [name, b] : model_bodies()) {
    const auto bp = find_breakpoints(b.upper());
    std::vector<BlockSpec> blocks;
    for (double R : {64.0, 128.0, 256.0, 512.0})
      for (const auto& blk : dyadic_split(bp, default_delta(R), R).blocks)
        if (blk.M >= 2) blocks.push_back(blk);
    int done = 0;
    for (long attempt = 0; done < 500 && attempt < 1000000; ++attempt) {
      const auto& spec = blocks[std::uniform_int_distribution<std::size_t>(0, blocks.size() - 1)(rng)];
      const std::int64_t m = std::uniform_int_distribution<std::int64_t>(spec.M, 2 * spec.M - 2)(rng);
      const std::int64_t l = std::uniform_int_distribution<std::int64_t>(1, 2 * spec.M - 1 - m)(rng);
      const auto [a, c] = phi_interval(spec, m, l);
      if (!(a <= c) || !(capital_phi_ell(b, m, l, spec) > 1e-3)) continue;
      try {
        const auto r = kuzmin_landau_check(b, m, l, spec);
        if (!r.holds) return {false, name + ": |sum| = " + fmt(r.sum_abs) + " > 3 / " + fmt(r.Phi)};
        worst = std::max(worst, r.sum_abs * r.Phi);
        ++done;
      } catch (const MonotonicityError&) {
        ++skipped_monotone;
      }
    }
    checked += done;
  }
  return {checked >= 1000, std::to_string(checked) + " triples, max |sum| Phi = " + fmt(worst) + ", " +
                               std::to_string(skipped_monotone) + " skipped as non-monotone"};
}

Outcome weyl_step() {
  std::string detail;
  bool pass = true;
  for (const auto& [name, b] : model_bodies()) {
    const auto rep = ratio_harness("weyl-step", b);
    std::map<double, double> top;
    for (const auto& p : rep.points) top[p.scale] = std::max(top[p.scale], p.ratio / std::pow(p.scale, 0.05));
    std::vector<double> x, y;
    for (const auto& [R, v] : top) {
      x.push_back(R);
      y.push_back(v);
    }
    const double slope = log_log_slope(x, y);
    pass = pass && rep.points.size() == 81 && slope <= kSlopeTolerance;
    detail += name + ": slope " + fmt(slope, 3) + " (" + std::to_string(rep.points.size()) + " points)  ";
  }
  return {pass, detail};
}

Outcome spacing_lemma() {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = std::uniform_int_distribution<int>(0, 1000)(rng);
    std::vector<double> a(static_cast<std::size_t>(len));
    // mixtures of clustered, uniform and lattice-like values, with exact zeros
    const int kind = trial % 4;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double v = 0.5 * unit(rng);
      if (kind == 1) v = 0.5 * std::pow(unit(rng), 4.0);
      if (kind == 2) v = 0.5 * static_cast<double>(i) / std::max<double>(1.0, a.size());
      if (kind == 3 && unit(rng) < 0.1) v = 0.0;
      a[i] = v;
    }
    const double H = std::pow(10.0, -1.0 + 5.0 * unit(rng));
    const auto r = spacing_sum(a, H);
    double lhs = 0.0;
    for (double v : a) lhs += v == 0.0 ? H : std::min(H, 1.0 / v);
    // the fitted pair must dominate the counting function
    std::vector<double> s = a;
    std::sort(s.begin(), s.end());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto c = static_cast<double>(std::upper_bound(s.begin(), s.end(), s[k]) - s.begin());
      if (c > r.A + r.B * s[k] + 1e-9 * c) return {false, "fitted (A, B) misses the count at trial " + std::to_string(trial)};
    }
    if (std::abs(r.lhs - lhs) > 1e-9 * std::max(1.0, lhs))
      return {false, "trial " + std::to_string(trial) + ": lhs " + fmt(r.lhs) + " vs direct " + fmt(lhs)};
    if (!r.holds || !(r.lhs <= r.rhs))
      return {false, "trial " + std::to_string(trial) + ": lhs " + fmt(r.lhs) + " rhs " + fmt(r.rhs)};
  }
  return {true, "1000 sequences of length <= 1000"};
}

Outcome ratio_harness_claims() {
  const char* claims[] = {"fprime-decay",          "fsecond-order",       "mixed-nnm",          "mixed-nmm",
                          "shift-linear",          "second-derivative-sum", "phase-count-spacing", "phase-count-divisor"};
  bool pass = true;
  std::ostringstream detail;
  for (const auto& [name, b] : model_bodies()) {
    for (const char* id : claims) {
      std::string line;
      bool ok = false;
      try {
        const auto rep = ratio_harness(id, b);
        ok = rep.pass;
        line = "slope " + fmt(rep.slope, 3) + ", max " + fmt(rep.max, 4);
        if (name == "sphere" && std::string(id) == "fprime-decay") {
          const bool half = std::abs(rep.min - 0.5) <= 1e-8 && std::abs(rep.max - 0.5) <= 1e-8;
          ok = ok && half;
          line += half ? ", ratio 1/2" : ", ratio not 1/2";
        }
      } catch (const std::exception& e) {
        line = e.what();
      }
      pass = pass && ok;
      detail << "\n      " << (ok ? "ok   " : "FAIL ") << name << " " << id << ": " << line;
    }
  }
  return {pass, detail.str()};
}

Outcome theorem_suite_check() {
  std::string detail;
  bool pass = true;
  for (const auto& [name, b] : model_bodies()) {
    const auto s = theorem_suite(b, {64.0, 128.0, 256.0, 512.0});
    pass = pass && s.pass_block && s.pass_tail;
    detail += name + ": block slope " + fmt(s.slope_block, 3) + ", tail slope " + fmt(s.slope_tail, 3) + "  ";
  }
  return {pass, detail};
}

Outcome exponent_fit() {
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 1.25, 1.5}) {
    std::vector<CountRecord> recs;
    for (int i = 0; i < 40; ++i) {
      CountRecord r;
      r.R = 10.0 * std::pow(1.1, i);
      r.E = (i % 2 ? -3.0 : 3.0) * std::pow(r.R, alpha);
      recs.push_back(r);
    }
    worst = std::max(worst, std::abs(fit_alpha(recs).alpha_hat - alpha));
  }
  std::vector<double> grid;
  for (int i = 0; i < 120; ++i) {
    const double R = std::round(100.0 * std::pow(30.0, i / 119.0));
    if (grid.empty() || R != grid.back()) grid.push_back(R);
  }
  const auto fit = fit_alpha(discrepancy_scan(unit_ball(), grid));
  return {worst <= 1e-10 && fit.alpha_hat >= 0.9 && fit.alpha_hat <= 1.5,
          "synthetic error " + fmt(worst) + "; unit ball alpha " + fmt(fit.alpha_hat) + " +- " + fmt(fit.ci, 2) +
              " from " + std::to_string(grid.size()) + " R values"};
}

Outcome determinism() {
  const std::string dir = REVLAT_BODIES_DIR;
  auto data_rows = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
      if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
  };
  std::vector<cli::RunConfig> configs;
  auto base = [&](const std::string& cmd, const std::string& body) {
    cli::RunConfig c;
    c.command = cmd;
    c.body_path = dir + "/" + body + ".json";
    c.timestamp = false;
    c.format = "csv";
    return c;
  };
  for (const char* body : {"sphere", "perturbed", "elliptic_sphere"}) {
    auto c = base("count", body);
    c.R = 27.5;
    configs.push_back(c);
    c = base("scan", body);
    c.R_min = 20;
    c.R_max = 30;
    c.step = 0.25;
    configs.push_back(c);
  }
  for (const char* body : {"sphere", "perturbed"}) {
    auto c = base("hv", body);
    c.R = 30;
    c.grid = 16;
    configs.push_back(c);
    c = base("blocks", body);
    c.R = 128;
    configs.push_back(c);
    c = base("weyl", body);
    c.R = 128;
    c.block_id = 3;
    configs.push_back(c);
    c = base("verify", body);
    c.claim = "phase-count-divisor";
    configs.push_back(c);
  }
  int compared = 0;
  for (auto c : configs) {
    std::string first;
    for (unsigned threads : {1u, 2u, 8u}) {
      c.threads = threads;
      std::ostringstream out, err;
      if (cli::run(c, out, err) != 0) return {false, c.command + " failed: " + err.str()};
      const auto rows = data_rows(out.str());
      if (threads == 1) first = rows;
      else if (rows != first) return {false, c.command + " differs at " + std::to_string(threads) + " threads"};
    }
    ++compared;
  }
  return {true, std::to_string(compared) + " commands at 1, 2 and 8 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact-counts", exact_counts},
      {"gauss-circle", gauss_circle},
      {"sphere-closed-forms", sphere_closed_forms},
      {"dm-equals-F", dm_equals_F},
      {"hardy-voronoi-agreement", hv_agreement},
      {"first-derivative-test", first_derivative_test},
      {"weyl-step", weyl_step},
      {"spacing-lemma", spacing_lemma},
      {"ratio-harness", ratio_harness_claims},
      {"theorem-suite", theorem_suite_check},
      {"exponent-fit", exponent_fit},
      {"determinism", determinism},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& [label, check] : criteria) {
    if (!only.empty() && label.find(only) == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << label << " [" << fmt(secs, 3) << " s] " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}

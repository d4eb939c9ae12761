#pragma once

// Command-line front end. Every command writes one table (CSV or JSON) that
// starts with the resolved configuration as metadata.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "revlat/analysis.hpp"
#include "revlat/body_io.hpp"
#include "revlat/counting.hpp"
#include "revlat/errors.hpp"
#include "revlat/expsum.hpp"
#include "revlat/hv.hpp"

namespace revlat::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  std::string body_path;
  std::optional<double> R, R_min, R_max, step;
  std::string delta = "auto";
  int grid = 64;
  std::optional<std::int64_t> block_id;
  double L = 1.0;
  std::string claim;
  std::string grid_path;
  std::string input;
  std::string out;              // empty: standard output
  std::string format = "auto";  // csv | json | auto (json for verify)
  unsigned threads = 0;         // 0: all hardware threads
  bool timestamp = true;
};

using json = nlohmann::json;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// JSON numbers cannot be NaN or infinite; those become strings.
inline json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

struct Table {
  std::vector<std::pair<std::string, json>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json extra = json::object();  // additional top-level JSON members
  std::string summary;          // printed when the table goes to a file

  void add_meta(std::string key, json value) { meta.emplace_back(std::move(key), std::move(value)); }
};

inline void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

inline void write_json(std::ostream& os, const Table& t) {
  json doc = json::object();
  json meta = json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  doc["meta"] = meta;
  for (const auto& [k, v] : t.extra.items()) doc[k] = v;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

inline double resolve_delta(const std::string& text, double R) {
  if (text == "auto") return default_delta(R);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v > 0.0))
    throw ValidationError("--delta must be 'auto' or a positive number, got '" + text + "'");
  return v;
}

inline double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw ValidationError(std::string("missing ") + flag);
  if (!std::isfinite(*v)) throw ValidationError(std::string(flag) + " must be finite");
  return *v;
}

inline std::vector<double> scan_grid(const RunConfig& c) {
  const double lo = need(c.R_min, "--R-min"), hi = need(c.R_max, "--R-max"), step = need(c.step, "--step");
  if (!(lo > 0.0)) throw ValidationError("--R-min must be positive");
  if (lo > hi) throw ValidationError("--R-min exceeds --R-max");
  if (!(step > 0.0)) throw ValidationError("--step must be positive");
  const double n = std::floor((hi - lo) / step + 1e-9);
  if (n > 1e7) throw ValidationError("scan grid has more than 1e7 points");
  std::vector<double> out;
  for (std::int64_t k = 0; k <= static_cast<std::int64_t>(n); ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

inline json count_row(const CountRecord& r) { return json::array({r.R, r.N, r.volume_term, r.E}); }

// ---------------------------------------------------------------------------
// Commands

inline Table cmd_count(const RunConfig& c, const BodyOfRevolution& body) {
  const double R = need(c.R, "--R");
  SliceOptions opt;
  opt.threads = c.threads;
  const auto rec = make_count_record(R, count_lattice_points(body, R, opt), volume(body));
  Table t;
  t.add_meta("R", R);
  t.columns = {"R", "N", "volume_term", "E"};
  t.rows.push_back(count_row(rec));
  t.summary = "N=" + std::to_string(rec.N) + " E=" + format_number(rec.E);
  return t;
}

inline Table cmd_scan(const RunConfig& c, const BodyOfRevolution& body) {
  const auto grid = scan_grid(c);
  SliceOptions opt;
  opt.threads = c.threads;
  Table t;
  t.add_meta("R_min", *c.R_min);
  t.add_meta("R_max", *c.R_max);
  t.add_meta("step", *c.step);
  t.columns = {"R", "N", "volume_term", "E"};
  for (const auto& r : discrepancy_scan(body, grid, opt)) t.rows.push_back(count_row(r));
  t.summary = std::to_string(t.rows.size()) + " records";
  return t;
}

inline Table cmd_hv(const RunConfig& c, const BodyOfRevolution& body) {
  const double R = need(c.R, "--R");
  const double delta = resolve_delta(c.delta, R);
  HvOptions hopt;
  hopt.threads = c.threads;
  SliceOptions sopt;
  sopt.threads = c.threads;
  const EtaCutoff eta;
  const auto s = scan_R_prime(body, R, delta, c.grid, eta, hopt, sopt);
  Table t;
  t.add_meta("R", R);
  t.add_meta("delta", delta);
  t.add_meta("grid", c.grid);
  t.add_meta("min_residual", s.min_residual);
  t.add_meta("median_residual", s.median_residual);
  t.add_meta("min_residual_over_R2_delta", s.min_residual / (R * R * delta));
  t.add_meta("best_R_prime", s.rows[s.best].R_prime);
  t.add_meta("dropped_edge", s.dropped_edge);
  t.add_meta("dropped_equator", s.dropped_equator);
  t.columns = {"R_prime", "E", "hv", "residual"};
  for (const auto& r : s.rows) t.rows.push_back({r.R_prime, r.E, r.hv, r.residual});
  t.summary = "min residual " + format_number(s.min_residual) + " at R'=" + format_number(s.rows[s.best].R_prime);
  return t;
}

struct Decomposition {
  double R = 0.0;
  double delta = 0.0;
  SplitResult split;
};

inline Decomposition decompose(const RunConfig& c, const BodyOfRevolution& body) {
  Decomposition d;
  d.R = need(c.R, "--R");
  if (!(d.R > 0.0)) throw ValidationError("--R must be positive");
  d.delta = resolve_delta(c.delta, d.R);
  d.split = dyadic_split(find_breakpoints(body.upper()), d.delta, d.R);
  return d;
}

inline Table cmd_blocks(const RunConfig& c, const BodyOfRevolution& body) {
  const auto d = decompose(c, body);
  const auto table = weight_table(body, static_cast<std::int64_t>(std::ceil(d.split.norm_cap)));
  SumOptions opt;
  opt.threads = c.threads;
  Table t;
  t.add_meta("R", d.R);
  t.add_meta("delta", d.delta);
  t.add_meta("singletons", d.split.singletons.size());
  t.add_meta("out_of_domain", d.split.out_of_domain.size());
  t.columns = {"id", "U1", "U2", "M", "j", "side", "abs_S", "bound_ratio", "term_count"};
  double worst = 0.0;
  for (std::size_t i = 0; i < d.split.blocks.size(); ++i) {
    const auto& b = d.split.blocks[i];
    const auto r = block_sum(body, b, table, opt);
    worst = std::max(worst, r.bound_ratio);
    t.rows.push_back({i, b.U1, b.U2, b.M, b.j, to_string(b.side), std::abs(r.value), r.bound_ratio, r.term_count});
  }
  t.summary = std::to_string(t.rows.size()) + " blocks, max bound_ratio " + format_number(worst);
  return t;
}

inline Table cmd_weyl(const RunConfig& c, const BodyOfRevolution& body) {
  const auto d = decompose(c, body);
  if (!c.block_id) throw ValidationError("missing --block-id");
  if (*c.block_id < 0 || static_cast<std::size_t>(*c.block_id) >= d.split.blocks.size())
    throw ValidationError("--block-id must lie in [0, " + std::to_string(d.split.blocks.size()) + ")");
  const auto& b = d.split.blocks[static_cast<std::size_t>(*c.block_id)];
  SumOptions opt;
  opt.threads = c.threads;
  const auto w = weyl_T(body, b, c.L, opt);
  const auto table = weight_table(body, static_cast<std::int64_t>(std::ceil(d.split.norm_cap)));
  const auto s = block_sum(body, b, table, opt);
  const double U = b.U2 - b.U1, M = static_cast<double>(b.M), L = static_cast<double>(w.L);
  const double rhs = U * U * std::pow(M, 6.0) / L + U * M * M * M * w.T;
  Table t;
  t.add_meta("R", d.R);
  t.add_meta("delta", d.delta);
  t.add_meta("block_id", *c.block_id);
  t.add_meta("L", c.L);
  t.columns = {"id", "U1", "U2", "M", "L", "T", "abs_S", "C"};
  t.rows.push_back({*c.block_id, b.U1, b.U2, b.M, w.L, w.T, std::abs(s.value), std::norm(s.value) / rhs});
  t.summary = "T=" + format_number(w.T) + " C=" + format_number(std::norm(s.value) / rhs);
  return t;
}

inline ClaimGrid grid_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("grid must be a JSON object");
  ClaimGrid g;
  auto numbers = [&](const std::string& k) {
    std::vector<double> v;
    if (!j[k].is_array()) throw ValidationError("grid '" + k + "' must be an array");
    for (const auto& x : j[k]) {
      if (!x.is_number()) throw ValidationError("grid '" + k + "' must contain numbers");
      v.push_back(x.get<double>());
    }
    return v;
  };
  auto integers = [&](const std::string& k) {
    std::vector<std::int64_t> v;
    for (double x : numbers(k)) {
      if (std::floor(x) != x) throw ValidationError("grid '" + k + "' must contain integers");
      v.push_back(static_cast<std::int64_t>(x));
    }
    return v;
  };
  auto number = [&](const std::string& k) {
    if (!j[k].is_number()) throw ValidationError("grid '" + k + "' must be a number");
    return j[k].get<double>();
  };
  for (const auto& [k, v] : j.items()) {
    if (k == "R") g.R = numbers(k);
    else if (k == "levels") g.levels = static_cast<int>(number(k));
    else if (k == "M") g.M = integers(k);
    else if (k == "M_fraction") g.M_fraction = numbers(k);
    else if (k == "ell") g.ell = integers(k);
    else if (k == "x") g.x = numbers(k);
    else if (k == "offsets") g.offsets = numbers(k);
    else if (k == "drift") g.drift = number(k);
    else if (k == "u_max") g.u_max = number(k);
    else if (k == "U1") g.U1 = number(k);
    else if (k == "U") g.U = numbers(k);
    else if (k == "L") g.L = integers(k);
    else if (k == "j") {
      if (!v.is_array()) throw ValidationError("grid 'j' must be an array");
      for (const auto& x : v) {
        if (x.is_string() && x.get<std::string>() == "inf") g.j.push_back(-1);
        else if (x.is_number_integer() && x.get<int>() >= 0) g.j.push_back(x.get<int>());
        else throw ValidationError("grid 'j' entries must be non-negative integers or \"inf\"");
      }
    } else {
      throw ValidationError("unknown grid key '" + k + "'");
    }
  }
  if (j.contains("levels") && g.levels < 1) throw ValidationError("grid 'levels' must be positive");
  return g;
}

inline Table cmd_verify(const RunConfig& c, const BodyOfRevolution& body) {
  if (c.claim.empty()) throw ValidationError("missing --claim (one of the registered claim ids)");
  find_claim(c.claim);
  const json grid_json = c.grid_path.empty() ? json::object() : read_json_file(c.grid_path, "grid");
  const auto rep = ratio_harness(c.claim, body, grid_from_json(grid_json));
  Table t;
  t.add_meta("claim", rep.claim);
  t.add_meta("grid", grid_json);
  t.add_meta("min", json_number(rep.min));
  t.add_meta("max", json_number(rep.max));
  t.add_meta("slope", json_number(rep.slope));
  if (rep.relation == Relation::two_sided) t.add_meta("slope_min", json_number(rep.slope_min));
  if (!std::isnan(rep.spread_change)) t.add_meta("spread_change", rep.spread_change);
  t.add_meta("pass", rep.pass);
  if (!rep.note.empty()) t.add_meta("note", rep.note);
  t.extra["claim"] = rep.claim;
  t.extra["grid"] = grid_json;
  t.extra["min"] = json_number(rep.min);
  t.extra["max"] = json_number(rep.max);
  t.extra["slope"] = json_number(rep.slope);
  t.extra["pass"] = rep.pass;
  json levels = json::array();
  for (std::size_t i = 0; i < rep.scales.size(); ++i)
    levels.push_back({{"scale", rep.scales[i]}, {"min", rep.level_min[i]}, {"max", rep.level_max[i]}});
  t.extra["levels"] = levels;

  t.columns = {"scale", "lhs", "rhs", "ratio"};
  std::vector<std::string> keys;
  for (const auto& p : rep.points)
    for (const auto& [k, v] : p.params)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  for (const auto& k : keys) t.columns.push_back(k);
  for (const auto& p : rep.points) {
    std::vector<json> row = {p.scale, json_number(p.lhs), json_number(p.rhs), json_number(p.ratio)};
    for (const auto& k : keys) {
      json cell = nullptr;
      for (const auto& [pk, pv] : p.params)
        if (pk == k) cell = pv;
      row.push_back(cell);
    }
    t.rows.push_back(std::move(row));
  }
  t.summary = rep.claim + (rep.pass ? " pass" : " fail") + " slope=" + format_number(rep.slope);
  return t;
}

inline std::vector<CountRecord> read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scan file '" + path + "'");
  std::vector<CountRecord> out;
  std::string line;
  int iR = -1, iE = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (iR < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "R") iR = static_cast<int>(i);
        if (cells[i] == "E") iE = static_cast<int>(i);
      }
      if (iR < 0 || iE < 0) throw ValidationError("scan file needs R and E columns");
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max(iR, iE)) throw ValidationError("short row in scan file");
    CountRecord r;
    try {
      r.R = std::stod(cells[static_cast<std::size_t>(iR)]);
      r.E = std::stod(cells[static_cast<std::size_t>(iE)]);
    } catch (const std::exception&) {
      throw ValidationError("unreadable number in scan file: " + line);
    }
    out.push_back(r);
  }
  return out;
}

inline Table cmd_fit(const RunConfig& c, const BodyOfRevolution* body) {
  std::vector<CountRecord> recs;
  Table t;
  if (!c.input.empty()) {
    recs = read_scan_csv(c.input);
    t.add_meta("input", c.input);
  } else {
    if (!body) throw ValidationError("fit needs --input or --body with --R-min/--R-max/--step");
    SliceOptions opt;
    opt.threads = c.threads;
    recs = discrepancy_scan(*body, scan_grid(c), opt);
    t.add_meta("R_min", *c.R_min);
    t.add_meta("R_max", *c.R_max);
    t.add_meta("step", *c.step);
  }
  const auto f = fit_alpha(recs);
  t.add_meta("alpha_hat", f.alpha_hat);
  t.add_meta("ci", f.ci);
  t.add_meta("intercept", f.intercept);
  t.add_meta("n_points", f.n_points);
  t.extra["alpha_hat"] = f.alpha_hat;
  t.extra["ci"] = f.ci;
  t.extra["n_points"] = f.n_points;
  std::erase_if(recs, [](const CountRecord& r) { return r.E == 0.0; });
  std::sort(recs.begin(), recs.end(), [](const CountRecord& a, const CountRecord& b) { return a.R < b.R; });
  t.columns = {"R", "E", "residual"};
  for (std::size_t i = 0; i < recs.size(); ++i) t.rows.push_back({recs[i].R, recs[i].E, f.residuals[i]});
  t.summary = "alpha_hat=" + format_number(f.alpha_hat) + " +- " + format_number(f.ci);
  return t;
}

// ---------------------------------------------------------------------------
// Dispatch

inline std::string timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// 0 on success, 1 on validation and other library errors, 2 on capacity errors.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const std::string format = c.format == "auto" ? (c.command == "verify" ? "json" : "csv") : c.format;
    if (format != "csv" && format != "json") throw ValidationError("--format must be csv or json");
    std::optional<BodyOfRevolution> body;
    json body_json;
    if (!c.body_path.empty()) {
      body_json = read_json_file(c.body_path, "body spec");
      body.emplace(body_from_json(body_json));
    } else if (c.command != "fit" || c.input.empty()) {
      throw ValidationError("missing --body");
    }

    Table t;
    if (c.command == "count") t = cmd_count(c, *body);
    else if (c.command == "scan") t = cmd_scan(c, *body);
    else if (c.command == "hv") t = cmd_hv(c, *body);
    else if (c.command == "blocks") t = cmd_blocks(c, *body);
    else if (c.command == "weyl") t = cmd_weyl(c, *body);
    else if (c.command == "verify") t = cmd_verify(c, *body);
    else if (c.command == "fit") t = cmd_fit(c, body ? &*body : nullptr);
    else throw ValidationError("unknown command '" + c.command + "'");

    std::vector<std::pair<std::string, json>> head = {{"revlat", kVersion}, {"command", c.command}};
    if (body) head.emplace_back("body", body_json.dump());
    head.emplace_back("threads", c.threads);
    if (c.timestamp) head.emplace_back("timestamp", timestamp_now());
    t.meta.insert(t.meta.begin(), head.begin(), head.end());

    std::ofstream file;
    if (!c.out.empty()) {
      file.open(c.out);
      if (!file) throw ValidationError("cannot write '" + c.out + "'");
    }
    std::ostream& os = c.out.empty() ? out : file;
    if (format == "csv") write_csv(os, t);
    else write_json(os, t);
    os.flush();
    if (!os) throw ValidationError("write failed");
    if (!c.out.empty()) out << t.summary << '\n';
    return 0;
  } catch (const CapacityError& e) {
    err << "revlat: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "revlat: " << e.what() << '\n';
    return 1;
  }
}

inline unsigned threads_from_env() {
  const char* v = std::getenv("REVLAT_THREADS");
  if (!v || !*v) return 0;
  unsigned n = 0;
  const auto res = std::from_chars(v, v + std::strlen(v), n);
  if (res.ec != std::errc() || *res.ptr != '\0') throw ValidationError("REVLAT_THREADS must be a non-negative integer");
  return n;
}

// Parses argv into a RunConfig; returns an exit code when the program should
// stop right away (help, version or a parse error).
inline std::optional<int> parse(int argc, char** argv, RunConfig& c, std::ostream& out = std::cout,
                                std::ostream& err = std::cerr) {
  CLI::App app{"Lattice points in bodies of revolution: counts, Hardy-Voronoi sums, exponential sums"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  std::optional<unsigned> threads;

  auto common = [&](CLI::App* sub, bool body_required) {
    auto* b = sub->add_option("--body", c.body_path, "body spec (JSON)")->check(CLI::ExistingFile);
    if (body_required) b->required();
    sub->add_option("--out,--emit", c.out, "output file (default: standard output)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json", "auto"}));
    sub->add_option("--threads", threads, "worker threads (0: all; default from REVLAT_THREADS)");
    sub->add_flag("!--no-timestamp", c.timestamp, "omit the timestamp from the metadata");
  };

  auto* count = app.add_subcommand("count", "lattice count N(R) and discrepancy E(R)");
  common(count, true);
  count->add_option("--R", c.R, "dilation")->required();

  auto* scan = app.add_subcommand("scan", "discrepancy over an arithmetic R grid");
  common(scan, true);
  scan->add_option("--R-min", c.R_min)->required();
  scan->add_option("--R-max", c.R_max)->required();
  scan->add_option("--step", c.step)->required();

  auto* hv = app.add_subcommand("hv", "truncated Hardy-Voronoi sum against E on an R' grid");
  common(hv, true);
  hv->add_option("--R", c.R)->required();
  hv->add_option("--delta", c.delta, "cutoff or 'auto' (R^-5/8)");
  hv->add_option("--grid", c.grid, "R' grid size")->check(CLI::PositiveNumber);

  auto* blocks = app.add_subcommand("blocks", "dyadic block decomposition with block sums");
  common(blocks, true);
  blocks->add_option("--R", c.R)->required();
  blocks->add_option("--delta", c.delta, "cutoff or 'auto' (R^-5/8)");

  auto* weyl = app.add_subcommand("weyl", "Weyl step T for one block of the decomposition");
  common(weyl, true);
  weyl->add_option("--R", c.R)->required();
  weyl->add_option("--delta", c.delta, "cutoff or 'auto' (R^-5/8)");
  weyl->add_option("--block-id", c.block_id, "row id from 'blocks'")->required();
  weyl->add_option("--L", c.L, "shift range");

  auto* verify = app.add_subcommand("verify", "ratio-stability check of one claim");
  common(verify, true);
  std::vector<std::string> ids;
  for (const auto& ci : claim_registry()) ids.push_back(ci.id);
  verify->add_option("--claim", c.claim, "claim id")->required()->check(CLI::IsMember(ids));
  verify->add_option("--grid", c.grid_path, "grid overrides (JSON)")->check(CLI::ExistingFile);

  auto* fit = app.add_subcommand("fit", "envelope exponent fit of |E(R)|");
  common(fit, false);
  fit->add_option("--input", c.input, "scan CSV to fit")->check(CLI::ExistingFile);
  fit->add_option("--R-min", c.R_min);
  fit->add_option("--R-max", c.R_max);
  fit->add_option("--step", c.step);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  try {
    c.threads = threads ? *threads : threads_from_env();
  } catch (const Error& e) {
    err << "revlat: " << e.what() << '\n';
    return 1;
  }
  return std::nullopt;
}

inline int main(int argc, char** argv) {
  RunConfig c;
  if (const auto stop = parse(argc, argv, c)) return *stop;
  return run(c);
}

}  // namespace revlat::cli

#pragma once

// JSON body specifications.
//
//   {"profile": "sphere", "radius": 1}
//   {"profile": "perturbed_parabola", "a": 0.5, "c": 1, "power": 6}
//   {"profile": "custom_poly", "coefficients": [1, 0, -0.5], "lower_coefficients": [...], "r_inf": 1.4}
//
// plus an optional "section" ({"type": "circular"} or {"type": "elliptic",
// "Qstar": [[a, b], [b, c]], "alpha": x, "beta": y}), an optional "r_inf" and
// an optional "name". Polynomial caps without "r_inf" close at the first zero
// of the upper cap.

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "revlat/errors.hpp"
#include "revlat/geometry.hpp"
#include "revlat/profiles.hpp"

namespace revlat {

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ValidationError("body spec: '" + key + "' must be a number");
  return j[key].get<double>();
}

inline std::int64_t json_integer(const nlohmann::json& v, const std::string& what) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<std::int64_t>(v.get<double>());
  throw ValidationError("body spec: " + what + " must be an integer");
}

inline std::vector<double> json_coefficients(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty())
    throw ValidationError("body spec: '" + key + "' must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw ValidationError("body spec: '" + key + "' must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

inline Section parse_section(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("body spec: section needs a string 'type'");
  const auto type = j["type"].get<std::string>();
  if (type == "circular") return CircularSection{};
  if (type != "elliptic") throw ValidationError("body spec: unknown section type '" + type + "'");
  if (!j.contains("Qstar") || !j["Qstar"].is_array() || j["Qstar"].size() != 2 || !j["Qstar"][0].is_array() ||
      !j["Qstar"][1].is_array() || j["Qstar"][0].size() != 2 || j["Qstar"][1].size() != 2)
    throw ValidationError("body spec: Qstar must be a 2x2 array");
  const auto& q = j["Qstar"];
  EllipticSection e;
  e.a = json_integer(q[0][0], "Qstar[0][0]");
  e.b = json_integer(q[0][1], "Qstar[0][1]");
  e.c = json_integer(q[1][1], "Qstar[1][1]");
  if (json_integer(q[1][0], "Qstar[1][0]") != e.b) throw ValidationError("body spec: Qstar must be symmetric");
  e.alpha = json_number(j, "alpha", 0.0);
  e.beta = json_number(j, "beta", 0.0);
  e.validate();
  return e;
}

inline void check_r_inf(double given, double actual) {
  if (std::abs(given - actual) > 1e-9 * actual)
    throw ValidationError("body spec: r_inf = " + std::to_string(given) + " but the cap closes at " +
                          std::to_string(actual));
}

}  // namespace detail

inline BodyOfRevolution body_from_json(const nlohmann::json& j) {
  using detail::json_number;
  if (!j.is_object()) throw ValidationError("body spec must be a JSON object");
  if (!j.contains("profile") || !j["profile"].is_string()) throw ValidationError("body spec needs a string 'profile'");
  const auto profile = j["profile"].get<std::string>();

  std::set<std::string> allowed = {"profile", "section", "r_inf", "name"};
  if (profile == "sphere") allowed.insert("radius");
  else if (profile == "perturbed_parabola") allowed.insert({"a", "c", "power"});
  else if (profile == "custom_poly") allowed.insert({"coefficients", "lower_coefficients"});
  else throw ValidationError("body spec: unknown profile '" + profile + "'");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ValidationError("body spec: unexpected key '" + key + "' for " + profile);

  const Section section = j.contains("section") ? detail::parse_section(j["section"]) : Section{CircularSection{}};
  const bool has_r_inf = j.contains("r_inf");
  const double r_inf = json_number(j, "r_inf", 0.0);
  if (has_r_inf && !(r_inf > 0.0)) throw ValidationError("body spec: r_inf must be positive");

  if (profile == "sphere") {
    const double rho = json_number(j, "radius", 1.0);
    if (!(rho > 0.0)) throw ValidationError("body spec: radius must be positive");
    if (has_r_inf) detail::check_r_inf(r_inf, rho);
    return mirrored_body(sphere_cap(rho), section);
  }
  if (profile == "perturbed_parabola") {
    const double a = json_number(j, "a", 0.5), c = json_number(j, "c", 1.0);
    const auto power = j.contains("power") ? detail::json_integer(j["power"], "power") : 6;
    if (!(a > 0.0) || !(c >= 0.0)) throw ValidationError("body spec: need a > 0 and c >= 0");
    const auto poly = perturbed_parabola(a, c, static_cast<int>(power));
    if (has_r_inf) detail::check_r_inf(r_inf, first_positive_root(poly));
    return polynomial_lens(poly, section);
  }
  const Polynomial upper(detail::json_coefficients(j, "coefficients"));
  const double top = has_r_inf ? r_inf : first_positive_root(upper);
  if (!j.contains("lower_coefficients")) return mirrored_body(polynomial_cap(upper, top), section);
  const Polynomial lower(detail::json_coefficients(j, "lower_coefficients"));
  return BodyOfRevolution(polynomial_cap(upper, top), polynomial_cap(lower, top), section);
}

inline nlohmann::json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + what + " '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(what + " '" + path + "' is not valid JSON: " + e.what());
  }
}

inline BodyOfRevolution load_body(const std::string& path) { return body_from_json(read_json_file(path, "body spec")); }

}  // namespace revlat

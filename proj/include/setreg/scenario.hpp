#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "setreg/constants.hpp"
#include "setreg/set_rep.hpp"

namespace setreg {

struct ExpectedValue {
  std::string quantity;
  double expected = 0.0;
  double tolerance = 0.05;
};

struct APSpec {
  Vec x0;
  std::optional<double> expected_rate;
  double rate_tolerance = 0.05;
  std::string mode = "monotone";  // "monotone" or "joining"
  int max_iters = 2000;
};

struct MappingSpec {
  std::string kind;  // "pair_product", "difference", "graph_pair"
  int nx = 0, ny = 0;
  Vec ybar;
};

struct Scenario {
  std::string name;
  int dim = 0;
  Vec xbar;
  SetRep A, B;
  EstimatorConfig config;
  std::vector<ExpectedValue> estimates;
  std::vector<std::string> checks;
  bool cone_violation_expected = false;
  std::optional<APSpec> ap;
  std::optional<MappingSpec> mapping;
};

namespace detail {

inline Vec json_vec(const nlohmann::json& j, int dim,
                    const std::string& field) {
  if (!j.is_array())
    throw ValidationError(field, "expected an array of numbers");
  if (static_cast<int>(j.size()) != dim)
    throw ValidationError(field, "expected " + std::to_string(dim) +
                                     " coordinates, got " +
                                     std::to_string(j.size()));
  Vec v = Vec::zero(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number())
      throw ValidationError(field, "non-numeric coordinate");
    v.c[i] = j[i].get<double>();
  }
  return v;
}

inline std::vector<Vec> json_vec_list(const nlohmann::json& j, int dim,
                                      const std::string& field) {
  if (!j.is_array()) throw ValidationError(field, "expected an array");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(json_vec(j[i], dim, field + "[" + std::to_string(i) + "]"));
  return out;
}

inline ConvexPiece json_piece(const nlohmann::json& j, int dim,
                              const std::string& field);

inline SetRep json_set(const nlohmann::json& j, int dim,
                       const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected an object");
  std::string type = j.value("type", "");
  if (type == "union") {
    if (!j.contains("pieces"))
      throw ValidationError(field + ".pieces", "missing");
    std::vector<ConvexPiece> pieces;
    const auto& arr = j.at("pieces");
    if (!arr.is_array() || arr.empty())
      throw ValidationError(field + ".pieces", "expected a nonempty array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      pieces.push_back(
          json_piece(arr[i], dim, field + ".pieces[" + std::to_string(i) + "]"));
    return SetRep{make_union(pieces)};
  }
  return as_set(json_piece(j, dim, field));
}

inline ConvexPiece json_piece(const nlohmann::json& j, int dim,
                              const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected an object");
  std::string type = j.value("type", "");
  if (type == "affine") {
    Vec base = json_vec(j.at("base"), dim, field + ".base");
    std::vector<Vec> basis;
    if (j.contains("basis"))
      basis = json_vec_list(j.at("basis"), dim, field + ".basis");
    basis = orthonormalize(basis);  // loader accepts any spanning list
    if (basis.empty()) return make_singleton(base);
    return make_affine(base, basis);
  }
  if (type == "singleton") {
    return make_singleton(json_vec(j.at("point"), dim, field + ".point"));
  }
  if (type == "ball") {
    Vec c = json_vec(j.at("center"), dim, field + ".center");
    if (!j.contains("radius") || !j.at("radius").is_number())
      throw ValidationError(field + ".radius", "missing or non-numeric");
    return make_ball(c, j.at("radius").get<double>());
  }
  if (type == "polytope") {
    auto verts = json_vec_list(j.at("vertices"), dim, field + ".vertices");
    return make_polytope(verts);
  }
  if (type == "polyhedron" || type == "halfspace") {
    std::vector<Halfspace> rows;
    if (type == "halfspace") {
      Halfspace h;
      h.normal = json_vec(j.at("normal"), dim, field + ".normal");
      if (!j.contains("offset") || !j.at("offset").is_number())
        throw ValidationError(field + ".offset", "missing or non-numeric");
      h.offset = j.at("offset").get<double>();
      rows.push_back(h);
    } else {
      const auto& arr = j.at("rows");
      if (!arr.is_array() || arr.empty())
        throw ValidationError(field + ".rows", "expected a nonempty array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string rf = field + ".rows[" + std::to_string(i) + "]";
        Halfspace h;
        h.normal = json_vec(arr[i].at("normal"), dim, rf + ".normal");
        if (!arr[i].contains("offset") || !arr[i].at("offset").is_number())
          throw ValidationError(rf + ".offset", "missing or non-numeric");
        h.offset = arr[i].at("offset").get<double>();
        rows.push_back(h);
      }
    }
    if (!j.contains("witness"))
      throw ValidationError(field + ".witness", "missing feasible point");
    Vec w = json_vec(j.at("witness"), dim, field + ".witness");
    return make_polyhedron(rows, w);
  }
  throw ValidationError(field + ".type", "unknown set type '" + type + "'");
}

inline const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> q = {
      "str", "str_prime", "tr", "tr_dual", "str1", "itr", "itr_w", "itr_c",
      "rg", "srg", "ap_rate"};
  return q;
}

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> c = {
      "str_prime_sandwich", "cone_transversality", "chain",
      "pair_product",       "graph_pair",          "difference_map",
      "rate_bounds"};
  return c;
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
  Scenario sc;
  if (!j.contains("name") || !j.at("name").is_string())
    throw ValidationError("name", "missing or not a string");
  sc.name = j.at("name").get<std::string>();
  if (!j.contains("dim") || !j.at("dim").is_number_integer())
    throw ValidationError("dim", "missing or not an integer");
  sc.dim = j.at("dim").get<int>();
  if (sc.dim < 1 || sc.dim > kMaxDim)
    throw ValidationError("dim", "must be between 1 and 8");

  if (!j.contains("A")) throw ValidationError("A", "missing set");
  if (!j.contains("B")) throw ValidationError("B", "missing set");
  sc.A = detail::json_set(j.at("A"), sc.dim, "A");
  sc.B = detail::json_set(j.at("B"), sc.dim, "B");

  if (!j.contains("xbar")) throw ValidationError("xbar", "missing");
  sc.xbar = detail::json_vec(j.at("xbar"), sc.dim, "xbar");
  if (distance(sc.A, sc.xbar) > 1e-7)
    throw ValidationError("xbar", "not a point of A");
  if (distance(sc.B, sc.xbar) > 1e-7)
    throw ValidationError("xbar", "not a point of B");

  if (j.contains("config")) {
    const auto& c = j.at("config");
    if (c.contains("samples_per_radius"))
      sc.config.samples_per_radius = c.at("samples_per_radius").get<int>();
    if (c.contains("seed"))
      sc.config.seed = c.at("seed").get<std::uint64_t>();
    if (c.contains("slack")) sc.config.slack = c.at("slack").get<double>();
    if (c.contains("radii")) {
      sc.config.radii.clear();
      for (const auto& r : c.at("radii"))
        sc.config.radii.push_back(r.get<double>());
    }
    if (c.contains("strengthened_filter"))
      sc.config.strengthened_filter = c.at("strengthened_filter").get<bool>();
    sc.config.validate();
  }

  if (j.contains("estimates")) {
    for (const auto& e : j.at("estimates")) {
      ExpectedValue ev;
      ev.quantity = e.value("quantity", "");
      const auto& kq = detail::known_quantities();
      if (std::find(kq.begin(), kq.end(), ev.quantity) == kq.end())
        throw ValidationError("estimates.quantity",
                              "unknown quantity '" + ev.quantity + "'");
      if (!e.contains("expected") || !e.at("expected").is_number())
        throw ValidationError("estimates.expected", "missing or non-numeric");
      ev.expected = e.at("expected").get<double>();
      ev.tolerance = e.value("tolerance", 0.05);
      if (ev.tolerance <= 0)
        throw ValidationError("estimates.tolerance", "must be positive");
      sc.estimates.push_back(ev);
    }
  }

  if (j.contains("checks")) {
    for (const auto& c : j.at("checks")) {
      std::string name = c.get<std::string>();
      const auto& kc = detail::known_checks();
      if (std::find(kc.begin(), kc.end(), name) == kc.end())
        throw ValidationError("checks", "unknown check '" + name + "'");
      sc.checks.push_back(name);
    }
  }
  sc.cone_violation_expected = j.value("cone_violation_expected", false);

  if (j.contains("ap")) {
    const auto& a = j.at("ap");
    APSpec ap;
    if (!a.contains("x0")) throw ValidationError("ap.x0", "missing");
    ap.x0 = detail::json_vec(a.at("x0"), sc.dim, "ap.x0");
    if (a.contains("expected_rate"))
      ap.expected_rate = a.at("expected_rate").get<double>();
    ap.rate_tolerance = a.value("rate_tolerance", 0.05);
    ap.mode = a.value("mode", "monotone");
    if (ap.mode != "monotone" && ap.mode != "joining")
      throw ValidationError("ap.mode", "must be 'monotone' or 'joining'");
    ap.max_iters = a.value("max_iters", 2000);
    sc.ap = ap;
  }

  if (j.contains("mapping")) {
    const auto& m = j.at("mapping");
    MappingSpec ms;
    ms.kind = m.value("kind", "");
    if (ms.kind != "pair_product" && ms.kind != "difference" &&
        ms.kind != "graph_pair")
      throw ValidationError("mapping.kind",
                            "unknown mapping kind '" + ms.kind + "'");
    if (ms.kind == "graph_pair") {
      ms.nx = m.value("nx", 0);
      ms.ny = m.value("ny", 0);
      if (ms.nx < 1 || ms.ny < 1 || ms.nx + ms.ny != sc.dim)
        throw ValidationError("mapping.nx",
                              "nx and ny must be positive and sum to dim");
      if (!m.contains("ybar")) throw ValidationError("mapping.ybar", "missing");
      ms.ybar = detail::json_vec(m.at("ybar"), ms.ny, "mapping.ybar");
    }
    sc.mapping = ms;
  }

  for (const ExpectedValue& ev : sc.estimates) {
    if ((ev.quantity == "rg" || ev.quantity == "srg") && !sc.mapping)
      throw ValidationError("mapping",
                            "required by estimate '" + ev.quantity + "'");
    if (ev.quantity == "ap_rate" && !sc.ap)
      throw ValidationError("ap", "required by estimate 'ap_rate'");
  }
  for (const std::string& c : sc.checks) {
    if (c == "graph_pair" && (!sc.mapping || sc.mapping->kind != "graph_pair"))
      throw ValidationError("mapping", "graph_pair check needs a graph_pair "
                                       "mapping");
    if (c == "rate_bounds" && !sc.ap)
      throw ValidationError("ap", "rate_bounds check needs an ap section");
  }
  if (j.contains("ap") && sc.ap->expected_rate) {
    double er = *sc.ap->expected_rate;
    if (er < 0.0 || er >= 1.0)
      throw ValidationError("ap.expected_rate", "must lie in [0, 1)");
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("file", "invalid JSON in '" + path + "': " +
                                      e.what());
  }
  try {
    return parse_scenario(j);
  } catch (ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError("file", "'" + path + "': " + e.what());
  }
}

}  // namespace setreg

#pragma once

// JSON forms of states, functionals, open sets and expressions.
//
//   state       "a-1 a-1" | "|0>" | [["1/2", "a-1 a-1"], ["3", "a-2"]]
//   functional  {"arity": m, "atoms": [{"coeff": "1", "factors": [{"delta": {"p": "0", "d": 0}}
//                                                              | {"moment": {"c": "0", "r": "3/2", "n": 1}}]}]}
//   open set    {"disc": {"center": "0", "radius": "1"}} | {"annulus": {"center", "inner", "outer"}}
//               | "plane" | {"union": [open set, ...]}
//   expression  {"carrier": name or open set, "terms": [{"functional": ..., "states": [...]}]}

#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "voxfact/expression.hpp"

namespace voxfact {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::string text(const nlohmann::json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ConfigError(where + ": expected an exact number written as a string");
}

inline int integer(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

template <class F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace detail

inline Scalar parse_scalar_json(const nlohmann::json& j, const std::string& where) {
  return detail::wrap(where, [&] { return Scalar::parse(detail::text(j, where)); });
}

inline Rational parse_rational_json(const nlohmann::json& j, const std::string& where) {
  return detail::wrap(where, [&] { return parse_rational(detail::text(j, where)); });
}

inline GaussianRational parse_gaussian_json(const nlohmann::json& j, const std::string& where) {
  return detail::wrap(where, [&] { return parse_gaussian(detail::text(j, where)); });
}

inline Monomial parse_monomial(const VertexEngine& e, const std::string& s, const std::string& where) {
  std::istringstream in(s);
  std::vector<PBWFactor> f;
  for (std::string tok; in >> tok;) {
    if (tok == "|0>") continue;
    f.push_back(detail::wrap(where, [&] { return e.parse_token(tok); }));
  }
  return Monomial(f);
}

inline GradedVector parse_state(const VertexEngine& e, const nlohmann::json& j, const std::string& where) {
  if (j.is_string()) return GradedVector(parse_monomial(e, j.get<std::string>(), where));
  if (!j.is_array()) throw ConfigError(where + ": a state is a monomial string or a list of [coeff, monomial] pairs");
  GradedVector v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw ConfigError(at + ": expected [coeff, monomial]");
    v.add_term(parse_monomial(e, detail::text(j[i][1], at), at), parse_gaussian_json(j[i][0], at));
  }
  return v;
}

inline std::vector<GradedVector> parse_states(const VertexEngine& e, const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of states");
  std::vector<GradedVector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_state(e, j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline AtomFactor parse_atom_factor(const nlohmann::json& j, const std::string& where) {
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    int order = d.contains("d") ? detail::integer(d.at("d"), where + ".delta.d") : 0;
    if (order < 0) throw ConfigError(where + ".delta.d: order must be >= 0");
    return delta(parse_scalar_json(detail::field(d, "p", where + ".delta"), where + ".delta.p"), order);
  }
  if (j.contains("moment")) {
    const auto& m = j.at("moment");
    Scalar c = parse_scalar_json(detail::field(m, "c", where + ".moment"), where + ".moment.c");
    Scalar r = parse_scalar_json(detail::field(m, "r", where + ".moment"), where + ".moment.r");
    int n = detail::integer(detail::field(m, "n", where + ".moment"), where + ".moment.n");
    try {
      return moment(c, r, n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".moment.r: " + e.what());
    }
  }
  throw ConfigError(where + ": a factor is {\"delta\": ...} or {\"moment\": ...}");
}

inline Functional parse_functional(const nlohmann::json& j, const std::string& where) {
  int arity = detail::integer(detail::field(j, "arity", where), where + ".arity");
  if (arity < 0) throw ConfigError(where + ".arity: must be >= 0");
  Functional f(static_cast<std::size_t>(arity));
  const auto& atoms = detail::field(j, "atoms", where);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    std::string at = where + ".atoms[" + std::to_string(i) + "]";
    Scalar c = atoms[i].contains("coeff") ? parse_scalar_json(atoms[i].at("coeff"), at + ".coeff") : Scalar(1);
    AtomicFunctional a;
    const auto& factors = detail::field(atoms[i], "factors", at);
    for (std::size_t k = 0; k < factors.size(); ++k) a.factors.push_back(parse_atom_factor(factors[k], at + ".factors[" + std::to_string(k) + "]"));
    if (a.arity() != static_cast<std::size_t>(arity)) throw ConfigError(at + ": factor count differs from arity");
    f.add(a, c);
  }
  return f;
}

inline OpenSet parse_open_set(const nlohmann::json& j, const std::string& where) {
  try {
    if (j.is_string() && j.get<std::string>() == "plane") return OpenSet::plane();
    if (j.contains("disc")) {
      const auto& d = j.at("disc");
      return OpenSet::disc(parse_gaussian_json(detail::field(d, "center", where), where + ".disc.center"),
                           parse_rational_json(detail::field(d, "radius", where), where + ".disc.radius"));
    }
    if (j.contains("annulus")) {
      const auto& a = j.at("annulus");
      return OpenSet::annulus(parse_gaussian_json(detail::field(a, "center", where), where + ".annulus.center"),
                              parse_rational_json(detail::field(a, "inner", where), where + ".annulus.inner"),
                              parse_rational_json(detail::field(a, "outer", where), where + ".annulus.outer"));
    }
    if (j.contains("union")) {
      std::vector<OpenSet> parts;
      const auto& u = j.at("union");
      for (std::size_t i = 0; i < u.size(); ++i) parts.push_back(parse_open_set(u[i], where + ".union[" + std::to_string(i) + "]"));
      return OpenSet::union_of(parts);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": an open set is \"plane\", {\"disc\"}, {\"annulus\"} or {\"union\"}");
}

inline nlohmann::json open_set_json(const OpenSet& u) {
  switch (u.kind()) {
    case OpenSet::Kind::plane: return "plane";
    case OpenSet::Kind::disc: return {{"disc", {{"center", u.center().str()}, {"radius", u.outer().get_str()}}}};
    case OpenSet::Kind::annulus:
      return {{"annulus", {{"center", u.center().str()}, {"inner", u.inner().get_str()}, {"outer", u.outer().get_str()}}}};
    case OpenSet::Kind::finite_union: {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& p : u.parts()) parts.push_back(open_set_json(p));
      return {{"union", parts}};
    }
  }
  return nullptr;
}

/// Named open sets: {"sets": {"U1": ..., "W": ...}}.
inline std::map<std::string, OpenSet> parse_geometry(const nlohmann::json& j) {
  std::map<std::string, OpenSet> out;
  const auto& sets = detail::field(j, "sets", "geometry");
  for (auto it = sets.begin(); it != sets.end(); ++it) out.emplace(it.key(), parse_open_set(it.value(), "geometry.sets." + it.key()));
  return out;
}

inline OpenSet resolve_open_set(const nlohmann::json& j, const std::map<std::string, OpenSet>& geometry, const std::string& where) {
  if (j.is_string() && j.get<std::string>() != "plane") {
    auto it = geometry.find(j.get<std::string>());
    if (it == geometry.end()) throw ConfigError(where + ": unknown open set '" + j.get<std::string>() + "'");
    return it->second;
  }
  return parse_open_set(j, where);
}

inline Expression parse_expression(const VertexEngine& e, const nlohmann::json& j, const std::map<std::string, OpenSet>& geometry,
                                   const std::string& where) {
  Expression x(resolve_open_set(detail::field(j, "carrier", where), geometry, where + ".carrier"));
  const auto& terms = detail::field(j, "terms", where);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string at = where + ".terms[" + std::to_string(i) + "]";
    Functional f = parse_functional(detail::field(terms[i], "functional", at), at + ".functional");
    auto states = parse_states(e, detail::field(terms[i], "states", at), at + ".states");
    if (states.size() != f.arity()) throw ConfigError(at + ": state count differs from arity");
    x.add(f, states);
  }
  try {
    x.validate();
  } catch (const DomainViolation& err) {
    throw ConfigError(where + ": " + err.what());
  }
  return x;
}

/// {"exprs": [{"name": "x", ...}, ...]} in file order.
inline std::vector<std::pair<std::string, Expression>> parse_expressions(const VertexEngine& e, const nlohmann::json& j,
                                                                        const std::map<std::string, OpenSet>& geometry) {
  std::vector<std::pair<std::string, Expression>> out;
  const auto& list = detail::field(j, "exprs", "exprs");
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string where = "exprs[" + std::to_string(i) + "]";
    std::string name = list[i].contains("name") ? detail::text(list[i].at("name"), where + ".name") : "x" + std::to_string(i);
    out.emplace_back(name, parse_expression(e, list[i], geometry, where));
  }
  return out;
}

inline nlohmann::json vector_json(const VertexEngine& e, const GradedVector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [m, c] : v.terms()) j.push_back({c.str(), e.format(m)});
  return j;
}

inline nlohmann::json vector_json(const VertexEngine& e, const NumericVector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [m, c] : v.terms()) j.push_back({{{"re", c.real()}, {"im", c.imag()}}, e.format(m)});
  return j;
}

/// Components keyed by degree.
template <class K>
nlohmann::json product_json(const VertexEngine& e, const ProductVectorT<K>& p) {
  nlohmann::json j = nlohmann::json::object();
  for (int k = p.window().lo; k <= p.window().hi; ++k) j[std::to_string(k)] = vector_json(e, p.component(k));
  return j;
}

}  // namespace voxfact

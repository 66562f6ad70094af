#pragma once
// JSON forms of the core structures, schemaVersion 1. Vertices and arrows are
// referenced by label/name; scalars are exact rationals written as strings
// ("-1/2"); paths are arrow names in traversal order.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tiltmut/algebra.hpp"
#include "tiltmut/dsl.hpp"
#include "tiltmut/errors.hpp"
#include "tiltmut/families.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/oracle.hpp"
#include "tiltmut/quiver.hpp"
#include "tiltmut/simplify.hpp"

namespace tiltmut {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Malformed JSON input (wrong shape or types), as opposed to a well-formed
// presentation that fails validation.
class SchemaError : public ValidationError {
 public:
  explicit SchemaError(const std::string& what) : ValidationError("schema: " + what) {}
};

namespace json_detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError("expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline const Json& array_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
  return v;
}

inline void check_version(const Json& j) {
  auto it = j.find("schemaVersion");
  if (it != j.end() && (!it->is_number_integer() || it->get<int>() != kSchemaVersion)) {
    throw SchemaError("unsupported schemaVersion");
  }
}

inline Scalar scalar_from(const Json& v) {
  if (v.is_number_integer()) return Scalar(v.get<long>());
  if (v.is_string()) {
    try {
      return parse_scalar(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
  }
  throw SchemaError("coefficient must be an integer or a rational string");
}

}  // namespace json_detail

inline Json path_to_json(const Presentation& p, const Path& path) {
  Json out = Json::array();
  for (int a : path.arrows) out.push_back(p.arrows[a].name);
  return out;
}

inline Json expr_to_json(const Presentation& p, const PathExpr& e) {
  Json terms = Json::array();
  for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
    terms.push_back({{"coefficient", to_string(it->second)},
                     {"path", path_to_json(p, it->first)}});
  }
  Json out;
  out["text"] = format_expr(p, e);
  if (!e.is_zero()) {
    out["source"] = p.vertices[e.source()];
    out["target"] = p.vertices[e.target()];
  }
  out["terms"] = std::move(terms);
  return out;
}

inline Json to_json(const Presentation& p, const std::string& name = "q") {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["name"] = name;
  j["vertices"] = p.vertices;
  Json arrows = Json::array();
  for (const auto& a : p.arrows) {
    arrows.push_back({{"name", a.name},
                      {"source", p.vertices[a.source]},
                      {"target", p.vertices[a.target]}});
  }
  j["arrows"] = std::move(arrows);
  Json rels = Json::array();
  for (const auto& r : p.relations) rels.push_back(expr_to_json(p, r));
  j["relations"] = std::move(rels);
  return j;
}

// Relations are read from "terms" when present, else from "text" (DSL
// syntax). The result is canonicalized but not validated.
inline Presentation presentation_from_json(const Json& j) {
  using namespace json_detail;
  check_version(j);
  Presentation p;
  for (const auto& v : array_field(j, "vertices")) {
    if (!v.is_string()) throw SchemaError("vertex labels must be strings");
    p.add_vertex(v.get<std::string>());
  }
  for (const auto& a : array_field(j, "arrows")) {
    p.add_arrow(string_field(a, "name"), p.vertex(string_field(a, "source")),
                p.vertex(string_field(a, "target")));
  }
  canonicalize(p);
  auto rit = j.find("relations");
  if (rit == j.end()) return p;
  if (!rit->is_array()) throw SchemaError("field 'relations' must be an array");
  for (const auto& r : *rit) {
    if (r.is_string()) {
      p.relations.push_back(parse_expr(p, r.get<std::string>()));
      continue;
    }
    auto terms = r.find("terms");
    if (terms == r.end()) {
      p.relations.push_back(parse_expr(p, string_field(r, "text")));
      continue;
    }
    if (!terms->is_array() || terms->empty()) throw SchemaError("relation terms must be a non-empty array");
    std::optional<PathExpr> e;
    for (const auto& t : *terms) {
      std::vector<int> word;
      for (const auto& a : array_field(t, "path")) {
        if (!a.is_string()) throw SchemaError("path entries must be arrow names");
        word.push_back(p.arrow(a.get<std::string>()));
      }
      Path path;
      if (word.empty()) {
        int v = p.vertex(string_field(r, "source"));
        path = trivial_path(v);
      } else {
        path = p.path_of(word);
      }
      if (!e) e = PathExpr(path.source, path.target);
      e->add_term(path, scalar_from(field(t, "coefficient")));
    }
    p.relations.push_back(std::move(*e));
  }
  return p;
}

inline Json to_json(const ValidationReport& rep) {
  Json v = Json::array();
  for (const auto& x : rep.violations) v.push_back({{"code", x.code}, {"message", x.message}});
  return {{"schemaVersion", kSchemaVersion}, {"valid", rep.ok()}, {"violations", std::move(v)}};
}

inline Json to_json(const Presentation& p, const FeasibilityReport& rep) {
  Json reasons = Json::array();
  for (const auto& r : rep.reasons) {
    Json x;
    x["code"] = feasibility_code_name(r.code);
    if (r.arrow) x["arrow"] = p.arrows[*r.arrow].name;
    if (r.witness) x["witness"] = expr_to_json(p, *r.witness);
    reasons.push_back(std::move(x));
  }
  return {{"schemaVersion", kSchemaVersion},
          {"vertex", p.vertices[rep.vertex]},
          {"feasible", rep.feasible},
          {"reasons", std::move(reasons)}};
}

inline Json to_json(const Provenance& pv) {
  return {{"step", pv.step}, {"origin", pv.origin}};
}

// `cleaned` is attached when the caller ran clean().
inline Json to_json(const Presentation& input, const MutationOutcome& m,
                    const std::optional<Presentation>& cleaned = std::nullopt) {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["vertex"] = input.vertices[m.star_vertex];
  j["starVertex"] = m.result.vertices[m.star_vertex];
  j["result"] = to_json(m.result, "mutated");
  Json arrows = Json::array();
  for (std::size_t k = 0; k < m.result.arrows.size() && k < m.arrow_provenance.size(); ++k) {
    Json a = to_json(m.arrow_provenance[k]);
    a["arrow"] = m.result.arrows[k].name;
    if (k < m.arrow_words.size()) a["word"] = m.arrow_words[k];
    arrows.push_back(std::move(a));
  }
  j["arrowProvenance"] = std::move(arrows);
  Json rels = Json::array();
  for (std::size_t k = 0; k < m.relation_provenance.size(); ++k) {
    Json r = to_json(m.relation_provenance[k]);
    if (k < m.result.relations.size()) r["relation"] = format_expr(m.result, m.result.relations[k]);
    rels.push_back(std::move(r));
  }
  j["relationProvenance"] = std::move(rels);
  Json minimal = Json::array();
  for (const auto& r : m.minimal_relations) minimal.push_back(format_expr(input, r));
  j["minimalRelations"] = std::move(minimal);
  if (cleaned) j["cleaned"] = to_json(*cleaned, "cleaned");
  return j;
}

inline Json to_json(const Fingerprint& f) {
  return {{"vertices", f.vertices}, {"arrows", f.arrows}, {"relations", f.relations}};
}

inline Json to_json(const Schedule& s) {
  Json expected = Json::array();
  for (const auto& e : s.expected) expected.push_back(e ? to_json(*e) : Json(nullptr));
  return {{"schemaVersion", kSchemaVersion}, {"steps", s.steps}, {"expected", std::move(expected)}};
}

inline Schedule schedule_from_json(const Json& j) {
  using namespace json_detail;
  check_version(j);
  Schedule s;
  for (const auto& v : array_field(j, "steps")) {
    if (!v.is_string()) throw SchemaError("schedule steps must be vertex labels");
    s.steps.push_back(v.get<std::string>());
  }
  auto it = j.find("expected");
  if (it != j.end()) {
    if (!it->is_array()) throw SchemaError("field 'expected' must be an array");
    for (const auto& e : *it) {
      if (e.is_null()) {
        s.expected.emplace_back();
        continue;
      }
      auto count = [&](const char* key) {
        const Json& v = field(e, key);
        if (!v.is_number_unsigned()) throw SchemaError("fingerprint counts must be non-negative");
        return v.get<std::size_t>();
      };
      s.expected.push_back(Fingerprint{count("vertices"), count("arrows"), count("relations")});
    }
  }
  return s;
}

// trace[0] is the start; trace[k] follows step k.
inline Json trace_to_json(const Schedule& s, const std::vector<Presentation>& trace) {
  Json steps = Json::array();
  for (std::size_t k = 1; k < trace.size(); ++k) {
    steps.push_back({{"vertex", k - 1 < s.steps.size() ? s.steps[k - 1] : ""},
                     {"presentation", to_json(trace[k], "step" + std::to_string(k))}});
  }
  return {{"schemaVersion", kSchemaVersion},
          {"schedule", to_json(s)},
          {"start", trace.empty() ? Json(nullptr) : to_json(trace.front(), "start")},
          {"steps", std::move(steps)}};
}

inline Json to_json(const Presentation& p1, const Presentation& p2, const IsoWitness& w) {
  Json vm = Json::object();
  for (std::size_t v = 0; v < w.vertex_map.size(); ++v) {
    vm[p1.vertices[v]] = p2.vertices[w.vertex_map[v]];
  }
  Json am = Json::array();
  for (std::size_t a = 0; a < p1.arrows.size(); ++a) {
    Json x;
    x["arrow"] = p1.arrows[a].name;
    if (a < w.arrow_images.size()) x["image"] = format_expr(p2, w.arrow_images[a]);
    am.push_back(std::move(x));
  }
  return {{"vertexMap", std::move(vm)}, {"arrowMap", std::move(am)}, {"monomial", w.monomial}};
}

inline Json iso_to_json(const Presentation& p1, const Presentation& p2,
                        const std::optional<IsoWitness>& w) {
  Json j{{"schemaVersion", kSchemaVersion}, {"isomorphic", w.has_value()}};
  if (w) j["witness"] = to_json(p1, p2, *w);
  return j;
}

inline Json to_json(const VerifyReport& rep) {
  Json j{{"schemaVersion", kSchemaVersion},
         {"match", rep.match},
         {"oracleDimensions",
          {{"mutated", rep.mutated_dimension}, {"oracle", rep.oracle_dimension}}},
         {"mutated", to_json(rep.mutated, "mutated")},
         {"oracle", to_json(rep.oracle, "oracle")}};
  if (rep.witness) j["witness"] = to_json(rep.mutated, rep.oracle, *rep.witness);
  return j;
}

inline Json basis_to_json(const NormalFormTable& t) {
  const Presentation& p = t.presentation();
  Json basis = Json::array();
  for (const auto& path : t.basis()) {
    basis.push_back({{"source", p.vertices[path.source]},
                     {"target", p.vertices[path.target]},
                     {"path", path_to_json(p, path)}});
  }
  return {{"schemaVersion", kSchemaVersion},
          {"dimension", t.dimension()},
          {"nilIndex", t.nil_index()},
          {"cartan", cartan_matrix(t)},
          {"basis", std::move(basis)}};
}

inline Json error_to_json(ErrorCode code, const std::string& message,
                          const Json& details = Json::object()) {
  return {{"code", error_code_name(code)},
          {"exitCode", static_cast<int>(code)},
          {"message", message},
          {"details", details}};
}

}  // namespace tiltmut

#pragma once
// Stateless JSON facade under /v1. Every response is an envelope
// {"ok": true, "data": ...} or {"ok": false, "error": {code, message, details}}.
// Schema problems answer 400, domain failures 422.

#include <map>
#include <string>

#include "tiltmut/dot.hpp"
#include "tiltmut/dsl.hpp"
#include "tiltmut/families.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/oracle.hpp"
#include "tiltmut/schema.hpp"
#include "tiltmut/simplify.hpp"

namespace httplib {
class Server;
}

namespace tiltmut {

struct ServiceOptions {
  std::size_t max_body = 1 << 20;
  int default_cap = default_degree_cap();
  int max_cap = 64;
  int max_family_size = 64;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

namespace service_detail {

// Thrown for malformed requests; answered with 400.
struct BadRequest : SchemaError {
  using SchemaError::SchemaError;
};

struct NotFound : Error {
  explicit NotFound(const std::string& what) : Error(ErrorCode::Validation, what) {}
};

inline std::string envelope_ok(Json data) {
  Json j;
  j["ok"] = true;
  j["data"] = std::move(data);
  return j.dump();
}

inline std::string envelope_error(ErrorCode code, const std::string& message,
                                  Json details = Json::object()) {
  Json err{{"code", error_code_name(code)}, {"message", message}, {"details", std::move(details)}};
  Json j;
  j["ok"] = false;
  j["error"] = std::move(err);
  return j.dump();
}

inline int vertex_of(const Presentation& p, const Json& v) {
  std::string label;
  if (v.is_string()) {
    label = v.get<std::string>();
  } else if (v.is_number_integer()) {
    label = std::to_string(v.get<long>());
  } else {
    throw BadRequest("vertex must be a label");
  }
  return p.vertex(label);
}

inline long int_param(const std::map<std::string, std::string>& q, const std::string& key,
                      long lo, long hi) {
  auto it = q.find(key);
  if (it == q.end()) throw BadRequest("missing query parameter '" + key + "'");
  long v = 0;
  try {
    std::size_t used = 0;
    v = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
  } catch (const std::exception&) {
    throw BadRequest("query parameter '" + key + "' must be an integer");
  }
  if (v < lo || v > hi) {
    throw BadRequest("query parameter '" + key + "' out of range [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  }
  return v;
}

}  // namespace service_detail

class Service {
 public:
  explicit Service(ServiceOptions opt = {}) : opt_(opt) {}

  const ServiceOptions& options() const noexcept { return opt_; }

  HttpResponse handle(const HttpRequest& req) const {
    using namespace service_detail;
    if (req.body.size() > opt_.max_body) {
      return {413, envelope_error(ErrorCode::Validation, "request body exceeds " +
                                                             std::to_string(opt_.max_body) +
                                                             " bytes")};
    }
    try {
      return {200, envelope_ok(dispatch(req))};
    } catch (const NotFound& e) {
      return {404, envelope_error(ErrorCode::Validation, e.what())};
    } catch (const SchemaError& e) {
      return {400, envelope_error(ErrorCode::Validation, e.what(), {{"kind", "schema"}})};
    } catch (const Json::exception& e) {
      return {400, envelope_error(ErrorCode::Validation, e.what(), {{"kind", "schema"}})};
    } catch (const InfeasibleMutation& e) {
      return {422, envelope_error(e.code(), e.what(), {{"report", feasibility_details(e)}})};
    } catch (const ParseError& e) {
      return {422, envelope_error(e.code(), e.what(),
                                  {{"line", e.line()}, {"column", e.column()}})};
    } catch (const NotAdmissibleWithinCap& e) {
      return {422, envelope_error(e.code(), e.what(), {{"cap", e.cap()}})};
    } catch (const Error& e) {
      return {e.code() == ErrorCode::Internal ? 500 : 422, envelope_error(e.code(), e.what())};
    } catch (const std::exception& e) {
      return {500, envelope_error(ErrorCode::Internal, e.what())};
    }
  }

  // Registers every route on an httplib server.
  void install(httplib::Server& server) const;

 private:
  ServiceOptions opt_;

  static Json feasibility_details(const InfeasibleMutation& e) {
    Json reasons = Json::array();
    for (const auto& r : e.report().reasons) reasons.push_back(feasibility_code_name(r.code));
    return {{"feasible", false}, {"reasons", reasons}};
  }

  Json parse_body(const HttpRequest& req) const {
    Json j;
    try {
      j = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      throw service_detail::BadRequest(std::string("body is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw service_detail::BadRequest("body must be a JSON object");
    return j;
  }

  int cap_of(const Json& body) const {
    auto it = body.find("degreeCap");
    if (it == body.end()) return std::min(opt_.default_cap, opt_.max_cap);
    if (!it->is_number_integer()) throw service_detail::BadRequest("degreeCap must be an integer");
    long cap = it->get<long>();
    if (cap < 1 || cap > opt_.max_cap) {
      throw service_detail::BadRequest("degreeCap must be in [1, " + std::to_string(opt_.max_cap) +
                                       "]");
    }
    return static_cast<int>(cap);
  }

  static Presentation presentation_in(const Json& body, const char* key) {
    return presentation_from_json(json_detail::field(body, key));
  }

  Json dispatch(const HttpRequest& req) const {
    using namespace service_detail;
    const std::string& path = req.path;
    if (req.method == "GET") {
      const long lim = opt_.max_family_size;
      if (path == "/v1/families/line") {
        return to_json(line_algebra(static_cast<int>(int_param(req.query, "n", 1, lim)),
                                    static_cast<int>(int_param(req.query, "m", 2, lim))),
                       "line");
      }
      if (path == "/v1/families/grid") {
        return to_json(grid(static_cast<int>(int_param(req.query, "r", 1, lim)),
                            static_cast<int>(int_param(req.query, "n", 1, lim))),
                       "grid");
      }
      if (path == "/v1/families/schedule") {
        return to_json(ladkani_schedule(static_cast<int>(int_param(req.query, "n", 2, lim))));
      }
      throw NotFound("no route GET " + path);
    }
    if (req.method != "POST") throw NotFound("no route " + req.method + " " + path);
    if (path == "/v1/parse") {
      Json body = parse_body(req);
      auto doc = parse_quiver(json_detail::string_field(body, "text"));
      return to_json(doc.body, doc.name);
    }
    if (path == "/v1/validate") {
      Json body = parse_body(req);
      Presentation p = presentation_in(body, "presentation");
      auto rep = validate(p);
      Json out = to_json(rep);
      if (rep.ok()) {
        try {
          auto t = build_table(p, cap_of(body));
          out["admissible"] = true;
          out["dimension"] = t.dimension();
          out["nilIndex"] = t.nil_index();
        } catch (const NotAdmissible& e) {
          out["admissible"] = false;
          out["reason"] = e.what();
        }
      }
      return out;
    }
    if (path == "/v1/feasible") {
      Json body = parse_body(req);
      Presentation p = presentation_in(body, "presentation");
      auto t = build_table(p, cap_of(body));
      auto v = body.find("vertex");
      if (v != body.end()) return to_json(p, check_feasible(t, vertex_of(p, *v)));
      Json reports = Json::object();
      for (std::size_t k = 0; k < p.vertex_count(); ++k) {
        reports[p.vertices[k]] = to_json(p, check_feasible(t, static_cast<int>(k)));
      }
      return {{"schemaVersion", kSchemaVersion}, {"reports", std::move(reports)}};
    }
    if (path == "/v1/mutate") {
      Json body = parse_body(req);
      Presentation p = presentation_in(body, "presentation");
      const int cap = cap_of(body);
      auto t = build_table(p, cap);
      int i = vertex_of(p, json_detail::field(body, "vertex"));
      bool want_clean = true;
      if (auto c = body.find("clean"); c != body.end()) {
        if (!c->is_boolean()) throw BadRequest("clean must be a boolean");
        want_clean = c->get<bool>();
      }
      auto m = mutate(t, i);
      std::optional<Presentation> cleaned;
      if (want_clean) cleaned = clean(m.result, cap);
      return to_json(p, m, cleaned);
    }
    if (path == "/v1/iso") {
      Json body = parse_body(req);
      Presentation p1 = presentation_in(body, "p1");
      Presentation p2 = presentation_in(body, "p2");
      IsoOptions io;
      io.cap = cap_of(body);
      return iso_to_json(p1, p2, find_isomorphism(p1, p2, io));
    }
    if (path == "/v1/verify") {
      Json body = parse_body(req);
      Presentation p = presentation_in(body, "presentation");
      auto t = build_table(p, cap_of(body));
      return to_json(verify(t, vertex_of(p, json_detail::field(body, "vertex"))));
    }
    if (path == "/v1/export/dot") {
      Json body = parse_body(req);
      Presentation p = presentation_in(body, "presentation");
      require_valid(p);
      std::string name = "q";
      const Json& pj = json_detail::field(body, "presentation");
      if (auto n = pj.find("name"); n != pj.end() && n->is_string()) name = n->get<std::string>();
      return {{"dot", export_dot(p, name)}};
    }
    throw NotFound("no route POST " + path);
  }
};

}  // namespace tiltmut

#pragma once
// Binds Service to cpp-httplib.

#include "httplib.h"
#include "tiltmut/service.hpp"

namespace tiltmut {

inline void Service::install(httplib::Server& server) const {
  server.set_payload_max_length(opt_.max_body);
  auto run = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, req.body, {}};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    HttpResponse out = handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  for (const char* path : {"/v1/families/line", "/v1/families/grid", "/v1/families/schedule"}) {
    server.Get(path, run);
  }
  for (const char* path : {"/v1/parse", "/v1/validate", "/v1/feasible", "/v1/mutate", "/v1/iso",
                           "/v1/verify", "/v1/export/dot"}) {
    server.Post(path, run);
  }
  // Oversized bodies are refused by httplib before a handler runs.
  server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    HttpResponse out = res.status == 413
                           ? HttpResponse{413, service_detail::envelope_error(
                                                   ErrorCode::Validation, "request body too large")}
                           : handle({req.method, req.path, "", {}});
    res.status = out.status;
    res.set_content(out.body, "application/json");
  });
}

}  // namespace tiltmut

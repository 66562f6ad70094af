#include <gtest/gtest.h>

#include <thread>

#include "fixtures.hpp"
#include "tiltmut/http.hpp"

using namespace tiltmut;

namespace {

Json call(const Service& s, const std::string& method, const std::string& path,
          const Json& body = nullptr, std::map<std::string, std::string> query = {},
          int* status = nullptr) {
  HttpRequest req{method, path, body.is_null() ? "" : body.dump(), std::move(query)};
  auto res = s.handle(req);
  if (status) *status = res.status;
  return Json::parse(res.body);
}

Json example1() { return to_json(fixtures::load(fixtures::kExample1), "example1"); }

}  // namespace

TEST(Service, ParseReturnsPresentation) {
  Service s;
  int status = 0;
  Json r = call(s, "POST", "/v1/parse", {{"text", fixtures::kExample1}}, {}, &status);
  EXPECT_EQ(status, 200);
  ASSERT_TRUE(r["ok"]);
  EXPECT_EQ(r["data"]["vertices"].size(), 7u);
  EXPECT_EQ(r["data"]["relations"].size(), 4u);
}

TEST(Service, ParseErrorIsDomainError) {
  Service s;
  int status = 0;
  Json r = call(s, "POST", "/v1/parse",
                {{"text", "quiver q\nvertices 1 2 3\narrow a : 1 -> 2\narrow b : 2 -> 3\n"
                          "relation a.b = 0\n"}},
                {}, &status);
  EXPECT_EQ(status, 422);
  EXPECT_FALSE(r["ok"]);
  EXPECT_EQ(r["error"]["code"], "ValidationError");
  EXPECT_EQ(r["error"]["details"]["line"], 5);
}

TEST(Service, ValidateReportsAdmissibility) {
  Service s;
  Json r = call(s, "POST", "/v1/validate", {{"presentation", example1()}});
  ASSERT_TRUE(r["ok"]);
  EXPECT_EQ(r["data"]["valid"], true);
  EXPECT_EQ(r["data"]["admissible"], true);
  EXPECT_EQ(r["data"]["dimension"], 18);
  Json bad = Json::parse(R"({"vertices": ["1"], "arrows": [{"name": "b", "source": "1",
    "target": "1"}], "relations": ["b.b - 2*b.b.b"]})");
  r = call(s, "POST", "/v1/validate", {{"presentation", bad}});
  EXPECT_EQ(r["data"]["admissible"], false);
}

TEST(Service, FeasibleBulkHasOneReportPerVertex) {
  Service s;
  Json r = call(s, "POST", "/v1/feasible", {{"presentation", example1()}});
  ASSERT_TRUE(r["ok"]);
  const Json& reps = r["data"]["reports"];
  EXPECT_EQ(reps.size(), 7u);
  EXPECT_EQ(reps["7"]["feasible"], false);
  EXPECT_EQ(reps["7"]["reasons"][0]["code"], "NoOutgoingArrows");
  EXPECT_EQ(reps["3"]["feasible"], true);
}

TEST(Service, FeasibleSingle) {
  Service s;
  Json r = call(s, "POST", "/v1/feasible", {{"presentation", example1()}, {"vertex", "3"}});
  EXPECT_EQ(r["data"]["feasible"], true);
  r = call(s, "POST", "/v1/feasible", {{"presentation", example1()}, {"vertex", 7}});
  EXPECT_EQ(r["data"]["feasible"], false);
}

TEST(Service, MutateExample1WithProvenance) {
  Service s;
  Json r = call(s, "POST", "/v1/mutate",
                {{"presentation", example1()}, {"vertex", "3"}, {"clean", true}});
  ASSERT_TRUE(r["ok"]) << r.dump();
  const Json& d = r["data"];
  Presentation cleaned = presentation_from_json(d["cleaned"]);
  EXPECT_TRUE(are_isomorphic(cleaned, fixtures::load(fixtures::kExample1Mutated)));
  std::set<int> steps;
  for (const auto& a : d["arrowProvenance"]) steps.insert(a["step"].get<int>());
  for (const auto& a : d["relationProvenance"]) steps.insert(a["step"].get<int>());
  EXPECT_TRUE(steps.count(2));
  EXPECT_TRUE(steps.count(3));
  bool bar = false;
  for (const auto& a : d["arrowProvenance"]) {
    if (a["step"] == 3 && a["origin"] == "delta.gamma + zeta.epsilon") bar = true;
  }
  EXPECT_TRUE(bar) << d["arrowProvenance"].dump();
}

TEST(Service, MutateInfeasibleIs422) {
  Service s;
  int status = 0;
  Json r = call(s, "POST", "/v1/mutate",
                {{"presentation", example1()}, {"vertex", "7"}, {"clean", false}}, {}, &status);
  EXPECT_EQ(status, 422);
  EXPECT_EQ(r["error"]["code"], "InfeasibleMutation");
}

TEST(Service, IsoAndVerify) {
  Service s;
  Json r = call(s, "POST", "/v1/iso",
                {{"p1", to_json(fixtures::load(fixtures::kExample1Mutated))},
                 {"p2", to_json(clean(mutate(fixtures::load(fixtures::kExample1), 2).result))}});
  EXPECT_EQ(r["data"]["isomorphic"], true);
  EXPECT_TRUE(r["data"].contains("witness"));
  r = call(s, "POST", "/v1/iso", {{"p1", example1()}, {"p2", to_json(grid(2, 2))}});
  EXPECT_EQ(r["data"]["isomorphic"], false);
  r = call(s, "POST", "/v1/verify", {{"presentation", example1()}, {"vertex", "3"}});
  EXPECT_EQ(r["data"]["match"], true);
  EXPECT_EQ(r["data"]["oracleDimensions"]["oracle"], 18);
}

TEST(Service, Families) {
  Service s;
  Json r = call(s, "GET", "/v1/families/grid", nullptr, {{"r", "2"}, {"n", "2"}});
  ASSERT_TRUE(r["ok"]);
  EXPECT_EQ(presentation_from_json(r["data"]), grid(2, 2));
  r = call(s, "GET", "/v1/families/line", nullptr, {{"n", "4"}, {"m", "3"}});
  EXPECT_EQ(presentation_from_json(r["data"]), line_algebra(4, 3));
  r = call(s, "GET", "/v1/families/schedule", nullptr, {{"n", "3"}});
  EXPECT_EQ(r["data"]["steps"], Json::parse(R"(["1", "3", "2"])"));
  int status = 0;
  call(s, "GET", "/v1/families/grid", nullptr, {{"r", "x"}, {"n", "2"}}, &status);
  EXPECT_EQ(status, 400);
  call(s, "GET", "/v1/families/grid", nullptr, {{"r", "2"}, {"n", "100000"}}, &status);
  EXPECT_EQ(status, 400);
}

TEST(Service, ExportDot) {
  Service s;
  Json r = call(s, "POST", "/v1/export/dot", {{"presentation", to_json(grid(2, 2))}});
  ASSERT_TRUE(r["ok"]);
  EXPECT_NE(r["data"]["dot"].get<std::string>().find("style=dashed"), std::string::npos);
}

TEST(Service, SchemaViolationsAre400) {
  Service s;
  int status = 0;
  call(s, "POST", "/v1/mutate", Json{{"vertex", "1"}}, {}, &status);
  EXPECT_EQ(status, 400);
  HttpRequest junk{"POST", "/v1/iso", "{not json", {}};
  EXPECT_EQ(s.handle(junk).status, 400);
  call(s, "POST", "/v1/mutate", {{"presentation", example1()}, {"vertex", "3"}, {"clean", "yes"}},
       {}, &status);
  EXPECT_EQ(status, 400);
  call(s, "POST", "/v1/nothing", Json::object(), {}, &status);
  EXPECT_EQ(status, 404);
}

TEST(Service, DegreeCapBoundedByServer) {
  ServiceOptions opt;
  opt.max_cap = 8;
  Service s(opt);
  int status = 0;
  call(s, "POST", "/v1/validate", {{"presentation", example1()}, {"degreeCap", 9}}, {}, &status);
  EXPECT_EQ(status, 400);
  call(s, "POST", "/v1/validate", {{"presentation", example1()}, {"degreeCap", 6}}, {}, &status);
  EXPECT_EQ(status, 200);
  Json r = call(s, "POST", "/v1/feasible",
                {{"presentation", to_json(line_algebra(8, 8))}, {"degreeCap", 3}}, {}, &status);
  EXPECT_EQ(status, 422);
  EXPECT_EQ(r["error"]["code"], "NotAdmissibleWithinCap");
}

TEST(Service, BodySizeCap) {
  ServiceOptions opt;
  opt.max_body = 64;
  Service s(opt);
  HttpRequest big{"POST", "/v1/parse", std::string(65, ' '), {}};
  EXPECT_EQ(s.handle(big).status, 413);
}

TEST(Service, ResponsesAreByteIdentical) {
  Service s;
  HttpRequest req{"POST", "/v1/mutate",
                  Json{{"presentation", example1()}, {"vertex", "3"}, {"clean", true}}.dump(), {}};
  EXPECT_EQ(s.handle(req).body, s.handle(req).body);
  EXPECT_EQ(Service().handle(req).body, s.handle(req).body);
}

TEST(Service, OverHttp) {
  Service s;
  httplib::Server server;
  s.install(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/v1/families/grid?r=2&n=2");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(presentation_from_json(Json::parse(res->body)["data"]), grid(2, 2));
  res = client.Post("/v1/feasible", Json{{"presentation", example1()}}.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(Json::parse(res->body)["data"]["reports"].size(), 7u);
  res = client.Post("/v1/mutate", std::string((1 << 20) + 10, ' '), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 413);
  EXPECT_EQ(Json::parse(res->body)["ok"], false);
  server.stop();
  th.join();
}

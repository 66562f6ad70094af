#include <gtest/gtest.h>

#include "dot_grammar.hpp"
#include "fixtures.hpp"
#include "tiltmut/corpus.hpp"
#include "tiltmut/dot.hpp"
#include "tiltmut/families.hpp"
#include "tiltmut/schema.hpp"

using namespace tiltmut;

TEST(Dot, Example1Counts) {
  auto s = dotcheck::check(export_dot(fixtures::load(fixtures::kExample1), "example1"));
  ASSERT_TRUE(s.ok) << s.error;
  EXPECT_TRUE(s.directed);
  EXPECT_EQ(s.nodes, 7u);
  EXPECT_EQ(s.solid_edges, 7u);
  EXPECT_EQ(s.dashed_edges, 4u);
}

TEST(Dot, GridCounts) {
  auto s = dotcheck::check(export_dot(grid(2, 2)));
  ASSERT_TRUE(s.ok) << s.error;
  EXPECT_EQ(s.nodes, 4u);
  EXPECT_EQ(s.solid_edges, 4u);
  EXPECT_EQ(s.dashed_edges, 1u);
}

TEST(Dot, NodesOnly) {
  Presentation p;
  p.add_vertex("a");
  p.add_vertex("b c");
  auto s = dotcheck::check(export_dot(p));
  ASSERT_TRUE(s.ok) << s.error;
  EXPECT_EQ(s.nodes, 2u);
  EXPECT_EQ(s.solid_edges + s.dashed_edges, 0u);
}

TEST(Dot, QuotesAwkwardLabels) {
  Presentation p;
  p.add_vertex("x\"y");
  p.add_vertex("3*");
  p.add_arrow("bar(1)", 0, 1);
  p.add_arrow("q\\r", 1, 0);
  auto text = export_dot(p, "we\"ird");
  auto s = dotcheck::check(text);
  ASSERT_TRUE(s.ok) << s.error << "\n" << text;
  EXPECT_EQ(s.edge_labels, (std::vector<std::string>{"bar(1)", "q\\r"}));
}

TEST(Dot, CheckerRejectsBrokenInput) {
  EXPECT_FALSE(dotcheck::check("digraph { a -> }").ok);
  EXPECT_FALSE(dotcheck::check("digraph { a -- b }").ok);
  EXPECT_FALSE(dotcheck::check("digraph { \"a }").ok);
  EXPECT_FALSE(dotcheck::check("digraph { a [label=] }").ok);
}

TEST(Dot, MutatedExample1Labels) {
  auto p = clean(mutate(fixtures::load(fixtures::kExample1), 2).result);
  auto s = dotcheck::check(export_dot(p));
  ASSERT_TRUE(s.ok) << s.error;
  EXPECT_EQ(s.solid_edges, p.arrows.size());
  EXPECT_EQ(s.dashed_edges, p.relations.size());
}

TEST(Dsl, RoundTripOnCorpus) {
  CorpusOptions opt;
  opt.seed = 5;
  opt.count = 200;
  for (const auto& p : generate_corpus(opt)) {
    auto back = parse_quiver(serialize_quiver(p)).body;
    EXPECT_EQ(back, p) << serialize_quiver(p);
  }
}

TEST(Dsl, RoundTripOnMutations) {
  auto p = mutate(fixtures::load(fixtures::kExample1), 2).result;
  EXPECT_EQ(parse_quiver(serialize_quiver(p)).body, p);
}

TEST(Json, PresentationRoundTrip) {
  CorpusOptions opt;
  opt.seed = 9;
  opt.count = 100;
  for (const auto& p : generate_corpus(opt)) {
    Json j = to_json(p);
    EXPECT_EQ(j["schemaVersion"], 1);
    EXPECT_EQ(presentation_from_json(Json::parse(j.dump())), p);
  }
}

TEST(Json, RelationsFromText) {
  Json j = Json::parse(R"({"vertices": ["1", "2", "3"],
    "arrows": [{"name": "a", "source": "1", "target": "2"},
               {"name": "b", "source": "2", "target": "3"}],
    "relations": ["b.a", {"text": "2*b.a"}]})");
  auto p = presentation_from_json(j);
  ASSERT_EQ(p.relations.size(), 2u);
  EXPECT_EQ(p.relations[1], Scalar(2) * p.relations[0]);
}

TEST(Json, SchemaErrors) {
  EXPECT_THROW(presentation_from_json(Json::parse(R"({"arrows": []})")), SchemaError);
  EXPECT_THROW(presentation_from_json(Json::parse(R"({"vertices": "1"})")), SchemaError);
  EXPECT_THROW(presentation_from_json(Json::parse(R"({"schemaVersion": 2, "vertices": []})")),
               SchemaError);
  EXPECT_THROW(presentation_from_json(Json::parse(
                   R"({"vertices": ["1"], "arrows": [{"name": "a", "source": "1"}]})")),
               SchemaError);
  // Well-formed but referring to a missing vertex: a domain error.
  try {
    presentation_from_json(Json::parse(
        R"({"vertices": ["1"], "arrows": [{"name": "a", "source": "1", "target": "9"}]})"));
    FAIL();
  } catch (const SchemaError&) {
    FAIL() << "not a schema error";
  } catch (const ValidationError&) {
  }
}

TEST(Json, ScheduleRoundTrip) {
  Schedule s = ladkani_schedule(4);
  s.expected.assign(s.steps.size(), std::nullopt);
  s.expected[0] = Fingerprint{8, 7, 4};
  Schedule back = schedule_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(back.steps, s.steps);
  EXPECT_EQ(back.expected, s.expected);
}

TEST(Json, MutationOutcomeHasProvenance) {
  auto p = fixtures::load(fixtures::kExample1);
  auto t = build_table(p);
  auto m = mutate(t, 2);
  Json j = to_json(p, m, clean(m.result));
  EXPECT_EQ(j["schemaVersion"], 1);
  EXPECT_EQ(j["vertex"], "3");
  EXPECT_EQ(j["starVertex"], "3*");
  EXPECT_EQ(j["arrowProvenance"].size(), m.result.arrows.size());
  bool bar = false;
  for (const auto& a : j["arrowProvenance"]) {
    if (a["step"] == 3) bar = true;
  }
  EXPECT_TRUE(bar);
  EXPECT_TRUE(j.contains("cleaned"));
  EXPECT_EQ(presentation_from_json(j["result"]), m.result);
}

TEST(Json, FeasibilityWitness) {
  auto p = line_algebra(3, 2);
  auto rep = check_feasible(build_table(p), 1);
  Json j = to_json(p, rep);
  EXPECT_EQ(j["feasible"], false);
  EXPECT_EQ(j["reasons"][0]["code"], "NonzeroShiftedHom");
  EXPECT_EQ(j["reasons"][0]["witness"]["text"], "a1");
}

TEST(Json, TraceSerializes) {
  auto s = ladkani_schedule(3);
  auto trace = run_schedule(line_algebra(6, 3), s);
  Json j = trace_to_json(s, trace);
  EXPECT_EQ(j["steps"].size(), 3u);
  EXPECT_EQ(presentation_from_json(j["steps"][2]["presentation"]), trace.back());
}

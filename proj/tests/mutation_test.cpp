#include <gtest/gtest.h>

#include "brute.hpp"
#include "fixtures.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/simplify.hpp"

using namespace tiltmut;

namespace {

bool has_relation(const Presentation& p, const std::string& text) {
  PathExpr want = parse_expr(p, text).monic();
  for (const auto& r : p.relations) {
    if (r.monic() == want) return true;
  }
  return false;
}

}  // namespace

TEST(Feasibility, SinkHasNoOutgoingArrows) {
  auto p = fixtures::load(fixtures::kExample1);
  auto rep = check_feasible(build_table(p), p.vertex("7"));
  EXPECT_FALSE(rep.feasible);
  EXPECT_TRUE(rep.has(FeasibilityCode::NoOutgoingArrows));
}

TEST(Feasibility, ZeroRelationGivesShiftedHom) {
  auto p = fixtures::load(R"(quiver a32
vertices 1 2 3
arrow alpha : 1 -> 2
arrow beta : 2 -> 3
relation beta.alpha = 0
)");
  auto rep = check_feasible(build_table(p), p.vertex("2"));
  ASSERT_FALSE(rep.feasible);
  ASSERT_EQ(rep.reasons.size(), 1u);
  EXPECT_EQ(rep.reasons[0].code, FeasibilityCode::NonzeroShiftedHom);
  ASSERT_TRUE(rep.reasons[0].witness);
  EXPECT_EQ(rep.reasons[0].witness->monic(), parse_expr(p, "alpha"));
}

TEST(Feasibility, Example1Vertex3) {
  auto p = fixtures::load(fixtures::kExample1);
  EXPECT_TRUE(check_feasible(build_table(p), p.vertex("3")).feasible);
}

TEST(Feasibility, LoopAtVertex) {
  auto p = fixtures::load(R"(quiver l
vertices 1 2
arrow x : 1 -> 1
arrow y : 1 -> 2
relation x.x = 0
)");
  auto rep = check_feasible(build_table(p), p.vertex("1"));
  EXPECT_TRUE(rep.has(FeasibilityCode::LoopAtVertex));
  EXPECT_THROW(mutate(build_table(p), p.vertex("1")), InfeasibleMutation);
}

TEST(Mutation, SingleArrowFlips) {
  auto p = fixtures::load("quiver a2\nvertices 1 2\narrow a : 1 -> 2\n");
  auto out = mutate(build_table(p), p.vertex("1"));
  const auto& r = out.result;
  ASSERT_EQ(r.arrows.size(), 1u);
  EXPECT_EQ(r.arrows[0].name, "a*");
  EXPECT_EQ(r.vertices[r.arrows[0].source], "2");
  EXPECT_EQ(r.vertices[r.arrows[0].target], "1*");
  EXPECT_TRUE(r.relations.empty());
}

TEST(Mutation, Example1Raw) {
  auto p = fixtures::load(fixtures::kExample1);
  auto out = mutate(build_table(p), p.vertex("3"));
  const auto& r = out.result;
  EXPECT_EQ(r.vertices.size(), 7u);
  EXPECT_EQ(r.vertices[out.star_vertex], "3*");
  for (const char* name : {"gamma·beta", "epsilon·beta", "gamma*", "epsilon*", "bar(1)",
                           "alpha", "delta", "zeta", "eta"}) {
    EXPECT_TRUE(r.find_arrow(name)) << name;
  }
  EXPECT_EQ(r.arrows.size(), 9u);
  EXPECT_TRUE(has_relation(r, "gamma*.gamma·beta + epsilon*.epsilon·beta"));
  EXPECT_TRUE(has_relation(r, "gamma·beta.alpha"));
  EXPECT_TRUE(has_relation(r, "epsilon·beta.alpha"));
  EXPECT_TRUE(has_relation(r, "eta.bar(1)"));
  // bar(r).gamma* = r/gamma = delta, up to the sign of bar(r).
  EXPECT_TRUE(has_relation(r, "bar(1).gamma* - delta") ||
              has_relation(r, "bar(1).gamma* + delta"));
  // Provenance: step-7 relation and step-2 arrows are tagged.
  bool saw7 = false;
  for (const auto& pv : out.relation_provenance) saw7 |= pv.step == 7;
  EXPECT_TRUE(saw7);
  EXPECT_EQ(out.arrow_provenance[*r.find_arrow("gamma*")].step, 2);
  EXPECT_EQ(out.arrow_provenance[*r.find_arrow("gamma·beta")].step, 1);
  EXPECT_EQ(out.arrow_provenance[*r.find_arrow("bar(1)")].step, 3);
  EXPECT_EQ(out.arrow_provenance[*r.find_arrow("eta")].step, 0);
}

TEST(Mutation, Example1Clean) {
  auto p = fixtures::load(fixtures::kExample1);
  auto out = mutate(build_table(p), p.vertex("3"));
  auto c = clean(out.result);
  EXPECT_EQ(c.arrows.size(), 7u);
  EXPECT_FALSE(c.find_arrow("delta"));
  EXPECT_FALSE(c.find_arrow("zeta"));
  EXPECT_EQ(c.relations.size(), 4u);
  auto expected = fixtures::load(fixtures::kExample1Mutated);
  EXPECT_TRUE(find_isomorphism(c, expected).has_value());
  EXPECT_EQ(brute::dimension(c), brute::dimension(expected));
}

TEST(Mutation, TwoCycleRaw) {
  auto p = fixtures::load(fixtures::kTwoCycle);
  auto out = mutate(build_table(p), p.vertex("1"));
  const auto& r = out.result;
  for (const char* name : {"alpha·beta", "alpha*", "alpha·bar(1)"}) {
    EXPECT_TRUE(r.find_arrow(name)) << name;
  }
  EXPECT_EQ(r.arrows.size(), 3u);
  EXPECT_TRUE(has_relation(r, "alpha*.alpha·beta"));
  EXPECT_TRUE(has_relation(r, "alpha·bar(1).alpha* - alpha·beta") ||
              has_relation(r, "alpha·bar(1).alpha* + alpha·beta"));
}

TEST(Mutation, TwoCycleCleanIsInput) {
  auto p = fixtures::load(fixtures::kTwoCycle);
  auto c = clean(mutate(build_table(p), p.vertex("1")).result);
  EXPECT_EQ(c.arrows.size(), 2u);
  auto w = find_isomorphism(c, p);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(p.vertices[w->vertex_map[c.vertex("1*")]], "1");
}

TEST(Mutation, RewriteAvoidingVertex) {
  auto p = fixtures::load(fixtures::kExample1);
  // Remove 3 by hand and check delta.gamma.beta -> delta.(gamma·beta).
  VertexRemovalMap m;
  m.removed = p.vertex("3");
  for (int v = 0; v < 7; ++v) m.vertex.push_back(v < m.removed ? v : (v == m.removed ? -1 : v - 1));
  m.arrow.assign(p.arrows.size(), -1);
  int next = 0;
  for (std::size_t a = 0; a < p.arrows.size(); ++a) {
    if (p.arrows[a].source != m.removed && p.arrows[a].target != m.removed) m.arrow[a] = next++;
  }
  m.composite[{p.arrow("beta"), p.arrow("gamma")}] = next++;
  Path path = p.path({"beta", "gamma", "delta"});
  Path out = rewrite_avoiding_vertex(p, path, m);
  ASSERT_EQ(out.arrows.size(), 2u);
  EXPECT_EQ(out.arrows[0], next - 1);
  EXPECT_EQ(out.arrows[1], m.arrow[p.arrow("delta")]);
  EXPECT_THROW(rewrite_avoiding_vertex(p, p.path({"beta"}), m), std::invalid_argument);
}

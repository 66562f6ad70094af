#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tiltmut/dsl.hpp"
#include "tiltmut/quiver.hpp"

using namespace tiltmut;

TEST(Quiver, Example1IsValid) {
  auto p = fixtures::load(fixtures::kExample1);
  EXPECT_EQ(p.vertices.size(), 7u);
  EXPECT_EQ(p.arrows.size(), 7u);
  EXPECT_EQ(p.relations.size(), 4u);
  EXPECT_TRUE(validate(p).ok());
}

TEST(Quiver, ComposeReadsRightToLeft) {
  auto p = fixtures::load(fixtures::kExample1);
  Path ba = compose(p.arrow_path(*p.find_arrow("beta")),
                    p.arrow_path(*p.find_arrow("alpha")));
  EXPECT_EQ(p.vertices[ba.source], "1");
  EXPECT_EQ(p.vertices[ba.target], "3");
  EXPECT_EQ(format_path(p, ba), "beta.alpha");
}

TEST(Quiver, NonComposableIsRejected) {
  auto p = fixtures::load(fixtures::kExample1);
  EXPECT_THROW(parse_expr(p, "alpha.beta"), ParseError);
}

TEST(Quiver, QuotientsOfCommutativity) {
  auto p = fixtures::load(fixtures::kExample1);
  PathExpr r = parse_expr(p, "delta.gamma + zeta.epsilon");
  PathExpr q = left_quotient(p, r, *p.find_arrow("gamma"));
  EXPECT_EQ(format_expr(p, q), "delta");
  PathExpr s = right_quotient(p, r, *p.find_arrow("zeta"));
  EXPECT_EQ(format_expr(p, s), "epsilon");
}

TEST(Quiver, QuotientsReconstruct) {
  auto p = fixtures::load(fixtures::kExample1);
  PathExpr r = parse_expr(p, "delta.gamma + zeta.epsilon");
  PathExpr back(r.source(), r.target());
  for (int a : p.arrows_from(r.source())) {
    back += compose_expr(left_quotient(p, r, a), PathExpr::of(p.arrow_path(a)));
  }
  EXPECT_EQ(back, r);
}

TEST(Quiver, ValidationCatchesProblems) {
  Presentation p;
  p.add_vertex("1");
  p.add_vertex("1");
  p.add_arrow("a", 0, 1);
  p.add_arrow("a", 1, 0);
  auto rep = validate(p);
  EXPECT_TRUE(rep.has("duplicate vertex label"));
  EXPECT_TRUE(rep.has("duplicate arrow name"));
}

TEST(Quiver, UnitTermNotAdmissible) {
  auto p = fixtures::load(fixtures::kTwoCycle);
  p.relations.push_back(parse_expr(p, "alpha"));
  EXPECT_TRUE(validate(p).has("non-admissible relation term"));
}

TEST(Dsl, RoundTrip) {
  auto d = parse_quiver(fixtures::kExample1);
  auto again = parse_quiver(serialize_quiver(d));
  EXPECT_EQ(d.body, again.body);
  EXPECT_EQ(again.name, "example1");
}

TEST(Dsl, CoefficientsAndEquations) {
  auto d = parse_quiver(R"(quiver c
vertices 1 2 3
arrow a : 1 -> 2
arrow b : 2 -> 3
arrow c : 1 -> 3  # comment
relation -1/2*b.a = c
)");
  ASSERT_EQ(d.body.relations.size(), 1u);
  const auto& r = d.body.relations[0];
  EXPECT_EQ(r.coefficient(d.body.path({"a", "b"})), Scalar(-1, 2));
  EXPECT_EQ(r.coefficient(d.body.path({"c"})), Scalar(-1));
  EXPECT_EQ(d.relation_lines[0], 6);
}

TEST(Dsl, ErrorsCarryLine) {
  try {
    parse_quiver("quiver x\nvertices 1 2\narrow a : 1 -> 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

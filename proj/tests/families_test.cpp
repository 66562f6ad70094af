#include <gtest/gtest.h>

#include "tiltmut/families.hpp"
#include "tiltmut/simplify.hpp"

using namespace tiltmut;

TEST(Families, LineAlgebraShape) {
  auto p = line_algebra(6, 3);
  EXPECT_EQ(p.vertex_count(), 6u);
  EXPECT_EQ(p.arrows.size(), 5u);
  EXPECT_EQ(p.relations.size(), 3u);
  EXPECT_EQ(build_table(p).dimension(), 6u + 5u + 4u);
  EXPECT_TRUE(line_algebra(3, 3).relations.empty());
}

TEST(Families, GridShape) {
  auto sq = grid(2, 2);
  EXPECT_EQ(fingerprint(sq), (Fingerprint{4, 4, 1}));
  EXPECT_EQ(build_table(sq).dimension(), 9u);
  // n-1 squares and 2(n-2) zero relations
  EXPECT_EQ(fingerprint(grid(2, 4)), (Fingerprint{8, 10, 3 + 4}));
  EXPECT_EQ(fingerprint(grid(3, 2)), (Fingerprint{6, 7, 2}));
}

TEST(Families, ScheduleShape) {
  EXPECT_EQ(ladkani_schedule(2).steps, std::vector<std::string>{"1"});
  EXPECT_EQ(ladkani_schedule(3).steps, (std::vector<std::string>{"1", "3", "2"}));
  EXPECT_EQ(ladkani_schedule(4).steps,
            (std::vector<std::string>{"1", "3", "2", "5", "4", "1*"}));
  for (int n = 2; n <= 7; ++n) {
    EXPECT_EQ(ladkani_schedule(n).steps.size(), static_cast<std::size_t>(n * (n - 1) / 2));
  }
}

TEST(Families, LineToGridSmall) {
  auto trace = run_schedule(line_algebra(4, 3), ladkani_schedule(2));
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_TRUE(are_isomorphic(trace.back(), grid(2, 2)));
}

class LineToGrid : public ::testing::TestWithParam<int> {};

TEST_P(LineToGrid, ReachesGrid) {
  const int n = GetParam();
  auto trace = run_schedule(line_algebra(2 * n, 3), ladkani_schedule(n));
  EXPECT_TRUE(are_isomorphic(trace.back(), grid(2, n)));
  for (const auto& p : trace) EXPECT_EQ(p.vertex_count(), static_cast<std::size_t>(2 * n));
}

INSTANTIATE_TEST_SUITE_P(Sizes, LineToGrid, ::testing::Values(2, 3, 4, 5, 6));

TEST(Families, InfeasibleStepReportsTrace) {
  Schedule s;
  s.steps = {"1", "4"};  // 4 is a sink in line(4, 3)
  try {
    run_schedule(line_algebra(4, 3), s);
    FAIL() << "expected ScheduleFailed";
  } catch (const ScheduleFailed& e) {
    EXPECT_EQ(e.step(), 1u);
    EXPECT_EQ(e.trace().size(), 2u);
    EXPECT_TRUE(e.report().has(FeasibilityCode::NoOutgoingArrows));
  }
}

TEST(Families, UnknownLabelIsValidationError) {
  Schedule s;
  s.steps = {"9"};
  EXPECT_THROW(run_schedule(line_algebra(4, 3), s), ValidationError);
}

TEST(Families, FingerprintMismatchIsReported) {
  Schedule s;
  s.steps = {"1"};
  s.expected = {Fingerprint{4, 4, 7}};
  EXPECT_THROW(run_schedule(line_algebra(4, 3), s), ValidationError);
  s.expected = {fingerprint(grid(2, 2))};
  EXPECT_NO_THROW(run_schedule(line_algebra(4, 3), s));
}

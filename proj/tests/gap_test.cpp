#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "bagbound/gap.hpp"
#include "bagbound/programs.hpp"
#include "bagbound/quantiles.hpp"
#include "test_support.hpp"

namespace bagbound {
namespace {

using testing::ConstantProgram;

const LowerBoundMethod kMethods[] = {BaggingMethod{3, 200, ResampleScheme::WithoutReplacement, 1},
                                     BaggingMethod{3, 200, ResampleScheme::WithReplacement, 1}, BatchingMethod{3},
                                     SingleReplicationMethod{}};

GapSetup setup_for(const StochasticProgram& p, Index n1, Index n2, std::uint64_t seed) {
  RngStream a(seed, {0});
  RngStream b(seed, {1});
  Dataset training = p.generate(n1, a);
  Dataset evaluation = p.generate(n2, b);
  return make_gap_setup(p, std::move(training), std::move(evaluation), 0.05);
}

TEST(Gap, ConstantProgramHasZeroGap) {
  const ProgramPtr p = std::make_shared<ConstantProgram>(4.0);
  const GapSetup s = setup_for(*p, 10, 10, 1);
  for (const auto& m : kMethods) {
    EXPECT_DOUBLE_EQ(gap_bound_bc(s, p, m, RngStream(1, {2})).upper_bound, 0.0);
    EXPECT_DOUBLE_EQ(gap_bound_crn(s, p, m, RngStream(1, {2})).upper_bound, 0.0);
  }
}

TEST(Gap, BonferroniComposition) {
  const ProgramPtr p = make_program("cvar");
  const GapSetup s = setup_for(*p, 20, 30, 2);
  for (const auto& m : kMethods) {
    const GapReport r = gap_bound_bc(s, p, m, RngStream(2, {2}));
    EXPECT_EQ(r.approach, GapApproach::Bonferroni);
    EXPECT_EQ(r.upper_bound, r.value_upper - r.lower.bound);
    EXPECT_EQ(r.lower.n, 50);
    EXPECT_DOUBLE_EQ(r.lower.alpha, 0.025);
    const BoundReport direct = lower_bound(Dataset::concat(s.training, s.evaluation), *p, m, 0.025, RngStream(2, {2}));
    EXPECT_EQ(r.lower.bound, direct.bound);
    std::vector<double> h;
    for (Index i = 0; i < 30; ++i) h.push_back(p->cost(s.x_hat, s.evaluation.observation(i)));
    const auto st = mean_var(h);
    EXPECT_NEAR(r.value_mean, st.mean, 1e-14);
    EXPECT_NEAR(r.value_upper, st.mean + normal_quantile(0.975) * st.stderr_of_mean(), 1e-13);
  }
}

TEST(Gap, CrnIsNegatedShiftedLowerBound) {
  const ProgramPtr p = make_program("ip");
  const GapSetup s = setup_for(*p, 10, 20, 3);
  for (const auto& m : kMethods) {
    const GapReport r = gap_bound_crn(s, p, m, RngStream(3, {2}));
    EXPECT_EQ(r.approach, GapApproach::CommonRandomNumbers);
    EXPECT_EQ(r.lower.n, 20);
    EXPECT_DOUBLE_EQ(r.lower.alpha, 0.05);
    const BoundReport direct = lower_bound(s.evaluation, *gap_program(p, s.x_hat), m, 0.05, RngStream(3, {2}));
    EXPECT_EQ(r.upper_bound, -direct.bound);
  }
}

TEST(GapProperty, CrnBoundIsNonnegative) {
  // Every shifted SAA value is at most 0, so bagging and batching points are too.
  for (const auto& key : program_keys()) {
    const ProgramPtr p = make_program(key);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GapSetup s = setup_for(*p, 8, 12, 100 + seed);
      for (const auto& m : kMethods) {
        EXPECT_GE(gap_bound_crn(s, p, m, RngStream(seed, {2})).upper_bound, -1e-12) << key;
      }
    }
  }
}

TEST(GapProperty, BonferroniDominatesValueUpperMinusPoint) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ProgramPtr p = make_program("portfolio");
    const GapSetup s = setup_for(*p, 10, 10, 200 + seed);
    const GapReport r = gap_bound_bc(s, p, kMethods[0], RngStream(seed, {2}));
    EXPECT_GE(r.upper_bound, r.value_upper - r.lower.point);
  }
}

TEST(Gap, ToyLpOptimalCandidateWithLargeEvaluationSample) {
  const ProgramPtr p = make_program("toylp");
  GapSetup s = setup_for(*p, 10, 10000, 4);
  s.x_hat = *p->true_solution();
  const GapReport batch = gap_bound_crn(s, p, BatchingMethod{1000}, RngStream(4, {2}));
  EXPECT_GE(batch.upper_bound, -1e-12);
  EXPECT_LE(batch.upper_bound, 0.05);
  const GapReport single = gap_bound_crn(s, p, SingleReplicationMethod{}, RngStream(4, {2}));
  EXPECT_GE(single.upper_bound, -1e-12);
  EXPECT_LE(single.upper_bound, 0.05);
}

TEST(GapProperty, ItemSelectionCrnCovers) {
  const ProgramPtr p = make_program("ip");
  const double z_star = *p->true_optimum();
  const int reps = 500;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    const GapSetup s = setup_for(*p, 20, 20, 1000 + static_cast<std::uint64_t>(r));
    const double truth = *p->objective(s.x_hat) - z_star;
    ASSERT_GE(truth, -1e-12);
    if (gap_bound_crn(s, p, BatchingMethod{5}, RngStream(5, {2})).upper_bound >= truth) ++covered;
  }
  // Nominal 0.95; four binomial standard errors below.
  EXPECT_GE(covered, static_cast<int>(reps * (0.95 - 4 * std::sqrt(0.95 * 0.05 / reps))));
}

TEST(Gap, Errors) {
  const ProgramPtr p = make_program("toylp");
  GapSetup s = setup_for(*p, 5, 1, 6);
  EXPECT_THROW(gap_bound_bc(s, p, SingleReplicationMethod{}, RngStream(6, {})), std::invalid_argument);
  EXPECT_THROW(gap_bound_crn(s, p, SingleReplicationMethod{}, RngStream(6, {})), std::invalid_argument);
  s = setup_for(*p, 5, 10, 6);
  s.x_hat = Decision::Constant(1, 5.0);
  EXPECT_THROW(gap_bound_bc(s, p, SingleReplicationMethod{}, RngStream(6, {})), std::invalid_argument);
  EXPECT_THROW(gap_bound_crn(s, p, SingleReplicationMethod{}, RngStream(6, {})), std::invalid_argument);
  s.x_hat = Decision::Constant(1, 1.0);
  s.alpha = 1.0;
  EXPECT_THROW(gap_bound_bc(s, p, SingleReplicationMethod{}, RngStream(6, {})), std::invalid_argument);
}

}  // namespace
}  // namespace bagbound

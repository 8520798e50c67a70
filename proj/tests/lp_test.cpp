#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bagbound/lp.hpp"
#include "bagbound/rng.hpp"

namespace bagbound::lp {
namespace {

double rel_tol(double v) { return 1e-7 * std::max(1.0, std::abs(v)); }

LinearProgram random_box_lp(RngStream& rng, bool with_equalities) {
  const auto n = static_cast<Eigen::Index>(1 + rng.below(4));
  const auto m = static_cast<Eigen::Index>(rng.below(7));
  LinearProgram lp(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lp.c(j) = std::round(rng.normal() * 4) / 2;
    const double lo = -static_cast<double>(rng.below(5));
    lp.lower(j) = lo;
    lp.upper(j) = lo + 1 + static_cast<double>(rng.below(6));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::RowVectorXd row(n);
    for (Eigen::Index j = 0; j < n; ++j) row(j) = static_cast<double>(static_cast<int>(rng.below(7)) - 3);
    lp.add_inequality(row, static_cast<double>(static_cast<int>(rng.below(9)) - 2));
  }
  if (with_equalities && n >= 2) {
    Eigen::RowVectorXd row(n);
    for (Eigen::Index j = 0; j < n; ++j) row(j) = static_cast<double>(static_cast<int>(rng.below(5)) - 2);
    const double rhs = static_cast<double>(static_cast<int>(rng.below(5)) - 2);
    lp.add_equality(row, rhs);
    lp.add_equality(2.0 * row, 2.0 * rhs);  // redundant
    if (rng.below(2) == 0) lp.add_equality(-row, -rhs);
  }
  return lp;
}

std::vector<int> active_set(const LinearProgram& lp, const Eigen::VectorXd& y) {
  std::vector<int> act;
  const Eigen::VectorXd r = lp.a_ub.rows() > 0 ? Eigen::VectorXd(lp.a_ub * y - lp.b_ub) : Eigen::VectorXd();
  for (Eigen::Index i = 0; i < r.size(); ++i) act.push_back(std::abs(r(i)) <= 1e-7 ? 1 : 0);
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    act.push_back(std::abs(y(j) - lp.lower(j)) <= 1e-7 ? 1 : 0);
    act.push_back(std::abs(y(j) - lp.upper(j)) <= 1e-7 ? 1 : 0);
  }
  return act;
}

TEST(Simplex, SingleLowerBound) {
  LinearProgram lp(1);
  lp.c << 1.0;
  lp.lower << 1.0;
  const auto s = simplex_solve(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_NEAR(s.point(0), 1.0, 1e-12);
  const auto e = enumerate_vertices(lp);
  EXPECT_NEAR(e.value, 1.0, 1e-12);
}

TEST(Simplex, BudgetRow) {
  LinearProgram lp(2);
  lp.c << -1.0, -1.0;
  lp.add_inequality(Eigen::RowVector2d(1.0, 1.0), 1.0);
  const auto s = simplex_solve(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, -1.0, 1e-12);
  EXPECT_NEAR(enumerate_vertices(lp).value, -1.0, 1e-12);
}

TEST(Simplex, InfeasibleBox) {
  LinearProgram lp(1);
  lp.c << 1.0;
  lp.lower << 1.0;
  lp.add_inequality(Eigen::RowVectorXd::Ones(1), 0.0);
  EXPECT_EQ(simplex_solve(lp).status, LpStatus::Infeasible);
  EXPECT_EQ(enumerate_vertices(lp).status, LpStatus::Infeasible);
}

TEST(Simplex, Unbounded) {
  LinearProgram lp(2);
  lp.c << -1.0, 0.0;
  lp.add_inequality(Eigen::RowVector2d(-1.0, 1.0), 1.0);
  EXPECT_EQ(simplex_solve(lp).status, LpStatus::Unbounded);
}

TEST(Simplex, FreeAndUpperBoundedVariables) {
  // min x - y  s.t. x + y = 2, x free, y <= 3  ->  x = -1, y = 3.
  LinearProgram lp(2);
  lp.c << 1.0, -1.0;
  lp.lower << -kInf, -kInf;
  lp.upper << kInf, 3.0;
  lp.add_equality(Eigen::RowVector2d(1.0, 1.0), 2.0);
  const auto s = simplex_solve(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.point(0), -1.0, 1e-9);
  EXPECT_NEAR(s.point(1), 3.0, 1e-9);
  EXPECT_NEAR(s.value, -4.0, 1e-9);
}

TEST(Simplex, IterationCapRaisesStalled) {
  LinearProgram lp(3);
  lp.c << -1.0, -2.0, -3.0;
  lp.add_inequality(Eigen::RowVector3d(1, 1, 1), 4.0);
  lp.add_inequality(Eigen::RowVector3d(1, 3, 0), 6.0);
  lp.add_inequality(Eigen::RowVector3d(0, 1, 4), 5.0);
  SimplexOptions opt;
  opt.max_iterations = 1;
  try {
    simplex_solve(lp, opt);
    FAIL();
  } catch (const SimplexStalled& e) {
    EXPECT_STREQ(e.what(), "simplex stalled");
  }
}

TEST(Simplex, ValidateRejectsBadShapes) {
  LinearProgram lp(2);
  lp.lower(0) = 2.0;
  lp.upper(0) = 1.0;
  EXPECT_THROW(simplex_solve(lp), std::invalid_argument);
  LinearProgram lp2(2);
  lp2.a_ub = Eigen::MatrixXd::Ones(1, 3);
  lp2.b_ub = Eigen::VectorXd::Ones(1);
  EXPECT_THROW(simplex_solve(lp2), std::invalid_argument);
}

TEST(EnumerateVertices, ScaleGuard) {
  LinearProgram lp(9);
  lp.upper.setOnes();
  try {
    enumerate_vertices(lp);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "oracle scale exceeded");
  }
}

TEST(SimplexProperty, MatchesVertexEnumerationOnRandomLps) {
  RngStream rng(101, {});
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LinearProgram lp = random_box_lp(rng, false);
    const auto s = simplex_solve(lp);
    const auto e = enumerate_vertices(lp);
    ASSERT_EQ(s.status, e.status) << "trial " << trial;
    if (s.status != LpStatus::Optimal) continue;
    ++optimal;
    EXPECT_NEAR(s.value, e.value, rel_tol(e.value)) << "trial " << trial;
    EXPECT_LE(max_violation(lp, s.point), 1e-7);
    EXPECT_NEAR(s.value, lp.c.dot(s.point), 1e-9 * std::max(1.0, std::abs(s.value)));
  }
  EXPECT_GT(optimal, 100);
}

TEST(SimplexProperty, RedundantEqualitiesMatchEnumeration) {
  RngStream rng(202, {});
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LinearProgram lp = random_box_lp(rng, true);
    const auto s = simplex_solve(lp);
    const auto e = enumerate_vertices(lp);
    ASSERT_EQ(s.status, e.status) << "trial " << trial;
    if (s.status != LpStatus::Optimal) continue;
    ++optimal;
    EXPECT_NEAR(s.value, e.value, rel_tol(e.value)) << "trial " << trial;
    EXPECT_LE(max_violation(lp, s.point), 1e-7);
  }
  EXPECT_GT(optimal, 50);
}

TEST(SimplexProperty, StrongDuality) {
  RngStream rng(303, {});
  for (int trial = 0; trial < 200; ++trial) {
    const LinearProgram lp = random_box_lp(rng, trial % 2 == 0);
    const auto s = simplex_solve(lp);
    if (s.status != LpStatus::Optimal) continue;
    EXPECT_NEAR(s.value, s.dual_value, rel_tol(s.value)) << "trial " << trial;
    EXPECT_GE(s.min_reduced_cost, -1e-7);
  }
}

TEST(SimplexProperty, ObjectiveScalingKeepsActiveSet) {
  RngStream rng(404, {});
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp = random_box_lp(rng, false);
    const auto s = simplex_solve(lp);
    if (s.status != LpStatus::Optimal) continue;
    const double lambda = 0.25 + 4 * rng.uniform();
    LinearProgram scaled = lp;
    scaled.c *= lambda;
    const auto t = simplex_solve(scaled);
    ASSERT_EQ(t.status, LpStatus::Optimal);
    EXPECT_NEAR(t.value, lambda * s.value, rel_tol(lambda * s.value));
    EXPECT_EQ(active_set(lp, s.point), active_set(lp, t.point)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace bagbound::lp

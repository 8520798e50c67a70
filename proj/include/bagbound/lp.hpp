#pragma once

#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace bagbound::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize c^T y  s.t.  A_eq y = b_eq,  A_ub y <= b_ub,  lower <= y <= upper.
/// Bounds may be infinite. A default-constructed program over m variables has
/// y >= 0 and no rows.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  LinearProgram() = default;
  explicit LinearProgram(Eigen::Index num_vars);

  Eigen::Index num_vars() const { return c.size(); }
  /// Throws std::invalid_argument on inconsistent dimensions or lo > hi.
  void validate() const;

  void add_equality(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs);
  void add_inequality(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status{LpStatus::Infeasible};
  double value{0.0};
  Eigen::VectorXd point;
  // Certificate from the final basis (Optimal only): the dual objective and
  // the most negative reduced cost, both recomputed from the original
  // standard-form data rather than read off the tableau.
  double dual_value{0.0};
  double min_reduced_cost{0.0};
  int iterations{0};
};

struct SimplexOptions {
  /// 0 selects 50 * (rows + cols) of the standard-form problem.
  int max_iterations{0};
  double feasibility_tol{1e-7};
  double pivot_tol{1e-9};
};

/// Raised when the iteration cap is hit; distinct from an Unbounded status.
class SimplexStalled : public std::runtime_error {
 public:
  SimplexStalled() : std::runtime_error("simplex stalled") {}
};

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Exact optimum by enumerating every basis of active constraints. Test
/// oracle only: assumes a bounded feasible region with at most 8 variables.
LpSolution enumerate_vertices(const LinearProgram& lp, double tol = 1e-9);

/// Largest violation of any constraint or bound at `y`.
double max_violation(const LinearProgram& lp, const Eigen::VectorXd& y);

}  // namespace bagbound::lp

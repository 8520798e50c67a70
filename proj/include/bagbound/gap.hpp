#pragma once

#include <variant>

#include "bagbound/bounds.hpp"
#include "bagbound/core.hpp"
#include "bagbound/program.hpp"
#include "bagbound/rng.hpp"

namespace bagbound {

/// Candidate x_hat solved on n1 training points, assessed on n2 independent
/// evaluation points.
struct GapSetup {
  Dataset training;
  Dataset evaluation;
  Decision x_hat;
  double alpha{0.05};
};

/// Solves the SAA on `training` for x_hat.
GapSetup make_gap_setup(const StochasticProgram& program, Dataset training, Dataset evaluation, double alpha);

struct BaggingMethod {
  Index k{0};
  Index bootstrap_size{0};  ///< 0 selects 5 n k
  ResampleScheme scheme{ResampleScheme::WithoutReplacement};
  unsigned threads{1};
};
struct BatchingMethod {
  Index k{0};
};
struct SingleReplicationMethod {};

using LowerBoundMethod = std::variant<BaggingMethod, BatchingMethod, SingleReplicationMethod>;

/// Level 1 - alpha lower bound on the optimal value of `program` from `data`.
/// Only bagging consumes `rng`.
BoundReport lower_bound(const Dataset& data, const StochasticProgram& program, const LowerBoundMethod& method,
                        double alpha, const RngStream& rng);

enum class GapApproach { Bonferroni, CommonRandomNumbers };

struct GapReport {
  GapApproach approach{GapApproach::Bonferroni};
  double upper_bound{0.0};
  /// L: on Z* over all n1 + n2 points (BC) or on -G(x_hat) over the
  /// evaluation points (CRN).
  BoundReport lower;
  /// BC only: U = mean + z_{1-alpha/2} * std_error at x_hat on the evaluation data.
  double value_upper{0.0};
  double value_mean{0.0};
  double value_std_error{0.0};
};

/// Bonferroni: U - L with both sides at level 1 - alpha/2.
GapReport gap_bound_bc(const GapSetup& setup, const ProgramPtr& program, const LowerBoundMethod& method,
                       const RngStream& rng);

/// Common random numbers: -L for the program with cost h(x, xi) - h(x_hat, xi)
/// on the evaluation data, at level 1 - alpha.
GapReport gap_bound_crn(const GapSetup& setup, const ProgramPtr& program, const LowerBoundMethod& method,
                        const RngStream& rng);

}  // namespace bagbound

#pragma once

#include <cstdint>

#include "bagbound/core.hpp"
#include "bagbound/program.hpp"
#include "bagbound/rng.hpp"

namespace bagbound {

struct OracleEstimate {
  double value{0.0};
  double mc_stderr{0.0};  ///< 0 for exact enumerations
  std::int64_t evaluations{0};
  bool exact{false};
};

/// Cap on kernel evaluations for the complete statistics.
inline constexpr std::int64_t kOracleEvaluationLimit = 1'000'000;

/// Average of H_k over all k-subsets, in lexicographic order.
OracleEstimate complete_u_statistic(const Dataset& data, Index k, const StochasticProgram& program);

/// Average of H_k over all n^k ordered tuples with repetition.
OracleEstimate complete_v_statistic(const Dataset& data, Index k, const StochasticProgram& program);

/// Monte Carlo estimate of W_k = E[H_k] from `reps` fresh size-k samples;
/// sample r is drawn from rng.substream(r).
OracleEstimate estimate_wk(const StochasticProgram& program, Index k, Index reps, const RngStream& rng,
                           unsigned threads = 1);

/// Nested Monte Carlo estimate of Var(g_k(xi)), g_k(xi) = E[H_k | xi_1 = xi].
///
/// Outer draw o comes from rng.substream({o, 0}); its inner draws from
/// rng.substream({o, 1 + j}). With group means m_o and within-group
/// variances s_o^2, the estimate is the mean of
///   T_o = O / (O - 1) * (m_o - m_bar)^2 - s_o^2 / inner,
/// which is unbiased for Var(g_k); mc_stderr is the standard error of T.
OracleEstimate estimate_gk_variance(const StochasticProgram& program, Index k, Index outer, Index inner,
                                    const RngStream& rng, unsigned threads = 1);

/// Piecewise-linear interpolation over d standard-normal arms,
///   h(x, xi) = (j + 1 - x) xi_j + (x - j) xi_{j+1} for x in [j, j + 1],
/// on x in [1, d]. The SAA minimum is the smallest arm mean.
ProgramPtr example1_program(Index d);

}  // namespace bagbound

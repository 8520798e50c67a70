#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bagbound/core.hpp"
#include "bagbound/program.hpp"
#include "bagbound/rng.hpp"

namespace bagbound {

enum class ResampleScheme { WithReplacement, WithoutReplacement };

std::string to_string(ResampleScheme s);

struct Resample {
  std::vector<Index> indices;  // size k, positions into the dataset
  Eigen::VectorXi counts;      // size n, counts(i) = multiplicity of i
};

/// k uniform draws from {0..n-1}: i.i.d. with replacement, or a uniform
/// k-subset (partial Fisher-Yates) without.
Resample resample_counts(RngStream& rng, Index n, Index k, ResampleScheme scheme);

/// Bootstrap size used throughout the experiments: 5 n k.
Index recommended_bootstrap_size(Index n, Index k);

struct BagOptions {
  Index k{0};
  Index bootstrap_size{0};  ///< B; 0 selects recommended_bootstrap_size(n, k)
  double alpha{0.05};
  ResampleScheme scheme{ResampleScheme::WithoutReplacement};
  unsigned threads{1};
};

struct BagOutput {
  double z_bag{0.0};
  double sigma_ij{0.0};
  double lower_bound{0.0};
  double quantile{0.0};
  Index k{0};
  Index bootstrap_size{0};
  Index n{0};
  double alpha{0.05};
  ResampleScheme scheme{ResampleScheme::WithoutReplacement};
  /// Cov_*(N_i, Z_k) for each datum.
  Eigen::VectorXd per_datum_cov;
  /// Sample standard deviation of the B resampled SAA values.
  double resample_std{0.0};
  /// B fell below 5 n k; the bound is still computed.
  bool below_recommended_b{false};
};

/// Bagged lower confidence bound on Z*.
///
/// Resample b draws its indices from rng.substream(b) and is solved exactly;
/// z_bag is the mean of the B resampled optimal values and sigma_ij the
/// infinitesimal-jackknife standard error,
///   sigma_ij^2 = c * sum_i Cov_*(N_i, Z_k)^2,
/// with c = 1 with replacement and (n / (n - k))^2 without. Covariances are
/// accumulated in O(n) memory in ascending b, so the result is bit-identical
/// for any thread count.
BagOutput bag_bound(const Dataset& data, const StochasticProgram& program, const BagOptions& options,
                    const RngStream& rng);

/// Direct evaluation of Cov_*(N_i, Z_k) = (1/B) sum_b (N_i^b - k/n)(Z_b - Z_bar)
/// from stored counts (one column per resample). O(n B) memory; for checks.
Eigen::VectorXd ij_covariance_direct(const std::vector<double>& z, const Eigen::MatrixXi& counts, Index k);

enum class BoundMethod { Bagging, Batching, SingleReplication };
enum class BoundSide { Lower, Upper };

std::string to_string(BoundMethod m);

struct BoundReport {
  BoundMethod method{BoundMethod::Bagging};
  BoundSide side{BoundSide::Lower};
  double bound{0.0};
  double point{0.0};
  double std_error{0.0};
  double quantile{0.0};
  Index n{0};
  Index k{0};               ///< resample or batch size; n for single replication
  Index bootstrap_size{0};  ///< bagging only
  Index batches{0};         ///< batching only
  double alpha{0.05};
  std::optional<ResampleScheme> scheme;
};

BoundReport to_report(const BagOutput& out);

/// Batch-means bound on the first m k observations, m = floor(n / k) >= 2.
/// Uses the t quantile with m - 1 degrees of freedom below 30 batches.
BoundReport batching_bound(const Dataset& data, const StochasticProgram& program, Index k, double alpha);

/// Single-replication bound from the full-sample SAA.
///
/// Without `gap_candidate`: lower bound Z_n - z * s / sqrt(n) on Z*, with s
/// the sample standard deviation of h(x_n*, xi_i). With a candidate x_hat:
/// upper bound on the gap of x_hat from the paired differences
/// h(x_hat, xi_i) - h(x_n*, xi_i).
BoundReport single_replication_bound(const Dataset& data, const StochasticProgram& program, double alpha,
                                     const std::optional<Decision>& gap_candidate = std::nullopt);

}  // namespace bagbound

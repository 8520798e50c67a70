#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace bagbound::constants {

/// Seed of the covariance generator. Bumping it changes the shipped
/// matrices, so it doubles as the constants version.
inline constexpr std::uint64_t kCovarianceSeed = 20190527;

/// Sigma = G G^T / d + 0.1 I with G standard normal drawn from
/// RngStream(seed, {d}) row by row.
Eigen::MatrixXd generate_covariance(Eigen::Index d, std::uint64_t seed = kCovarianceSeed);

// Shipped values of generate_covariance(5) and generate_covariance(10).
Eigen::MatrixXd portfolio_sigma();
Eigen::MatrixXd item_selection_sigma();

Eigen::VectorXd portfolio_mu();
inline constexpr double kPortfolioAlpha = 0.05;
inline constexpr double kPortfolioTarget = 3.0;

/// Minimum of the exact normal-return CVaR objective over the feasible
/// portfolios for the shipped Sigma, and its minimizer (c, x_1..x_5).
double portfolio_true_optimum();
Eigen::VectorXd portfolio_true_solution();

Eigen::VectorXd item_selection_mu();
Eigen::MatrixXd item_selection_a();
Eigen::VectorXd item_selection_b();

inline constexpr double kCvarAlpha = 0.1;

}  // namespace bagbound::constants

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bagbound/program.hpp"

namespace bagbound {

/// min_x x + (1/alpha1) E[(xi - x)_+], xi ~ N(0, 1): the (1 - alpha1) CVaR.
ProgramPtr cvar1d(double alpha1 = 0.1);

struct PortfolioParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  double alpha{0.05};
  double target{3.0};

  static PortfolioParams defaults();
};

/// Rockafellar-Uryasev CVaR portfolio over returns xi ~ N(mu, Sigma):
///   min_{c, x} c + (1/alpha) E[(-xi^T x - c)_+]
///   s.t. mu^T x >= target, sum x = 1, x >= 0.
/// Decisions are laid out as (c, x_1, ..., x_d).
ProgramPtr portfolio_cvar(const PortfolioParams& params = PortfolioParams::defaults());

struct ItemSelectionParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  static ItemSelectionParams defaults();
};

/// min E[xi^T x] s.t. A x <= b, x binary; SAA solved by enumerating the
/// feasible binary vectors.
ProgramPtr item_selection_ip(const ItemSelectionParams& params = ItemSelectionParams::defaults());

/// min_{-1 <= x <= 1} E[-0.05 x + (3 - 2x) xi], xi ~ N(0, 1).
ProgramPtr toy_lp();

/// The program with cost h(x, xi) - h(x_hat, xi). Its optimal value is
/// minus the optimality gap of x_hat. Throws if x_hat is infeasible.
ProgramPtr gap_program(ProgramPtr base, Decision x_hat);

/// Program by CLI key: "cvar", "portfolio", "ip", "toylp".
ProgramPtr make_program(std::string_view key);
std::vector<std::string> program_keys();

/// Exact CVaR of a portfolio under normal returns, minimized over c:
///   -mu^T x + sqrt(x^T Sigma x) * phi(z_{1-alpha}) / alpha,
/// at weights `x`.
double normal_portfolio_cvar(const PortfolioParams& params, const Eigen::VectorXd& x);

/// Frank-Wolfe duality gap of normal_portfolio_cvar at feasible weights `x`:
/// grad^T (x - s) with s the LP minimizer of grad^T s over the feasible set.
/// By convexity it bounds normal_portfolio_cvar(x) - min from above.
double portfolio_frank_wolfe_gap(const PortfolioParams& params, const Eigen::VectorXd& x);

}  // namespace bagbound

#pragma once

#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "bagbound/core.hpp"
#include "bagbound/rng.hpp"

namespace bagbound {

/// Decision vector. Scalar decisions have size 1; binary decisions hold 0/1.
using Decision = Eigen::VectorXd;

/// A finite sample passed to an SAA solver: one observation per column.
using SampleRef = Eigen::Ref<const Eigen::MatrixXd>;

struct SaaSolution {
  double value{0.0};
  Decision solution;
};

/// min_x E_F[h(x, xi)] with an exact solver for its sample average
/// approximation. Implementations are immutable and safe to share.
class StochasticProgram {
 public:
  virtual ~StochasticProgram() = default;

  virtual std::string name() const = 0;
  /// Dimension d of xi.
  virtual Index dim() const = 0;

  /// h(x, xi).
  virtual double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const = 0;
  /// Exact min_x (1/k) sum_i h(x, xi_i) over the columns of `sample`.
  /// Deterministic in the sample; throws std::invalid_argument if empty.
  virtual SaaSolution solve_saa(const SampleRef& sample) const = 0;
  /// One draw xi ~ F.
  virtual Eigen::VectorXd draw(RngStream& rng) const = 0;

  virtual bool is_feasible(const Decision& x) const = 0;

  /// Z* when known.
  virtual std::optional<double> true_optimum() const { return std::nullopt; }
  virtual std::optional<Decision> true_solution() const { return std::nullopt; }
  /// Z(x) = E[h(x, xi)] when available in closed form.
  virtual std::optional<double> objective(const Decision& /*x*/) const { return std::nullopt; }
  /// Where the value of true_optimum() comes from ("exact" or "derived").
  virtual std::string truth_tag() const { return "exact"; }

  /// n i.i.d. draws as a dataset.
  Dataset generate(Index n, RngStream& rng) const;

  /// One draw of H_k(first, xi_2, ..., xi_k) with xi_2..xi_k fresh from F.
  /// Programs with a cheap sufficient statistic may override this.
  virtual double conditional_saa_draw(const Eigen::Ref<const Eigen::VectorXd>& first, Index k,
                                      RngStream& rng) const;

  /// Sample average of h(x, .) over the columns of `sample`.
  double sample_average_cost(const Decision& x, const SampleRef& sample) const;
};

using ProgramPtr = std::shared_ptr<const StochasticProgram>;

}  // namespace bagbound

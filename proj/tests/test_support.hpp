#pragma once

#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "bagbound/program.hpp"
#include "bagbound/rng.hpp"

namespace bagbound::testing {

/// h(x, xi) = xi_0 with a single feasible decision: H_k is the sample mean.
class MeanProgram final : public StochasticProgram {
 public:
  std::string name() const override { return "mean"; }
  Index dim() const override { return 1; }
  double cost(const Decision&, const Eigen::Ref<const Eigen::VectorXd>& xi) const override { return xi(0); }
  SaaSolution solve_saa(const SampleRef& sample) const override {
    if (sample.cols() < 1) throw std::invalid_argument("empty sample");
    return {sample.sum() / static_cast<double>(sample.cols()), Decision::Zero(1)};
  }
  Eigen::VectorXd draw(RngStream& rng) const override { return Eigen::VectorXd::Constant(1, rng.normal()); }
  bool is_feasible(const Decision& x) const override { return x.size() == 1 && x(0) == 0.0; }
  std::optional<double> true_optimum() const override { return 0.0; }
  std::optional<double> objective(const Decision&) const override { return 0.0; }
};

/// h(x, xi) = c for every x and xi, x in [0, 1].
class ConstantProgram final : public StochasticProgram {
 public:
  explicit ConstantProgram(double c) : c_(c) {}
  std::string name() const override { return "constant"; }
  Index dim() const override { return 1; }
  double cost(const Decision&, const Eigen::Ref<const Eigen::VectorXd>&) const override { return c_; }
  SaaSolution solve_saa(const SampleRef& sample) const override {
    if (sample.cols() < 1) throw std::invalid_argument("empty sample");
    return {c_, Decision::Zero(1)};
  }
  Eigen::VectorXd draw(RngStream& rng) const override { return Eigen::VectorXd::Constant(1, rng.normal()); }
  bool is_feasible(const Decision& x) const override { return x.size() == 1 && x(0) >= 0.0 && x(0) <= 1.0; }
  std::optional<double> true_optimum() const override { return c_; }
  std::optional<double> objective(const Decision&) const override { return c_; }

 private:
  double c_;
};

inline Eigen::MatrixXd row(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace bagbound::testing

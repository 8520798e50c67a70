#include "bagbound/programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bagbound/linalg.hpp"
#include "bagbound/lp.hpp"
#include "bagbound/problem_constants.hpp"
#include "bagbound/quantiles.hpp"

namespace bagbound {

// ---------------------------------------------------------------------------
// StochasticProgram helpers

Dataset StochasticProgram::generate(Index n, RngStream& rng) const {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  Eigen::MatrixXd obs(dim(), n);
  for (Index i = 0; i < n; ++i) obs.col(i) = draw(rng);
  return Dataset(std::move(obs));
}

double StochasticProgram::conditional_saa_draw(const Eigen::Ref<const Eigen::VectorXd>& first,
                                               Index k, RngStream& rng) const {
  if (k < 1) throw std::invalid_argument("conditional_saa_draw: k must be >= 1");
  Eigen::MatrixXd sample(dim(), k);
  sample.col(0) = first;
  for (Index i = 1; i < k; ++i) sample.col(i) = draw(rng);
  return solve_saa(sample).value;
}

double StochasticProgram::sample_average_cost(const Decision& x, const SampleRef& sample) const {
  if (sample.cols() < 1) throw std::invalid_argument("empty sample");
  CompensatedSum<double> s;
  for (Index i = 0; i < sample.cols(); ++i) s += cost(x, sample.col(i));
  return s.value() / static_cast<double>(sample.cols());
}

namespace {

void require_nonempty(const SampleRef& sample, Index dim) {
  if (sample.cols() < 1) throw std::invalid_argument("empty sample");
  if (sample.rows() != dim) throw std::invalid_argument("sample dimension mismatch");
}

// ---------------------------------------------------------------------------

class Cvar1d final : public StochasticProgram {
 public:
  explicit Cvar1d(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cvar1d: alpha1 must lie in (0, 1)");
  }

  std::string name() const override { return "cvar"; }
  Index dim() const override { return 1; }

  double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const override {
    return x(0) + std::max(xi(0) - x(0), 0.0) / alpha_;
  }

  // Convex piecewise linear in x with breakpoints at the sample points: scan
  // them in sorted order with suffix sums. Exact ties keep the largest.
  SaaSolution solve_saa(const SampleRef& sample) const override {
    require_nonempty(sample, 1);
    const Index k = sample.cols();
    thread_local std::vector<double> s;
    s.resize(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = sample(0, i);
    std::sort(s.begin(), s.end());
    const double scale = 1.0 / (alpha_ * static_cast<double>(k));
    double suffix = 0.0;
    double best = std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (Index j = k - 1; j >= 0; --j) {
      const double t = s[static_cast<std::size_t>(j)];
      suffix += t;
      const double v = t + (suffix - t * static_cast<double>(k - j)) * scale;
      if (v < best) {
        best = v;
        arg = t;
      }
    }
    Decision x(1);
    x(0) = arg;
    return {best, x};
  }

  Eigen::VectorXd draw(RngStream& rng) const override {
    Eigen::VectorXd v(1);
    v(0) = rng.normal();
    return v;
  }

  bool is_feasible(const Decision& x) const override { return x.size() == 1 && std::isfinite(x(0)); }

  std::optional<double> true_optimum() const override {
    return normal_pdf(normal_quantile(1.0 - alpha_)) / alpha_;
  }
  std::optional<Decision> true_solution() const override {
    Decision x(1);
    x(0) = normal_quantile(1.0 - alpha_);
    return x;
  }
  std::optional<double> objective(const Decision& x) const override {
    const double t = x(0);
    // E[(xi - t)_+] = phi(t) - t (1 - Phi(t)) for standard normal xi.
    return t + (normal_pdf(t) - t * normal_cdf(-t)) / alpha_;
  }

 private:
  double alpha_;
};

// ---------------------------------------------------------------------------

class Portfolio final : public StochasticProgram {
 public:
  explicit Portfolio(PortfolioParams p) : p_(std::move(p)) {
    const Index d = p_.mu.size();
    if (d < 1 || p_.sigma.rows() != d || p_.sigma.cols() != d) {
      throw std::invalid_argument("portfolio: mu/Sigma dimension mismatch");
    }
    if (!(p_.alpha > 0.0 && p_.alpha <= 1.0)) throw std::invalid_argument("portfolio: alpha2 must lie in (0, 1]");
    if (p_.target > p_.mu.maxCoeff()) throw std::invalid_argument("target return infeasible");
    chol_ = cholesky(p_.sigma);
  }

  std::string name() const override { return "portfolio"; }
  Index dim() const override { return p_.mu.size(); }

  double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const override {
    const double c = x(0);
    const double loss = -xi.dot(x.tail(dim()));
    return c + std::max(loss - c, 0.0) / p_.alpha;
  }

  SaaSolution solve_saa(const SampleRef& sample) const override {
    require_nonempty(sample, dim());
    const Index d = dim();
    const Index k = sample.cols();
    lp::LinearProgram prog(1 + d + k);
    prog.c(0) = 1.0;
    prog.c.tail(k).setConstant(1.0 / (p_.alpha * static_cast<double>(k)));
    prog.lower(0) = -lp::kInf;
    prog.a_ub = Eigen::MatrixXd::Zero(k + 1, 1 + d + k);
    prog.b_ub = Eigen::VectorXd::Zero(k + 1);
    for (Index i = 0; i < k; ++i) {
      // -xi_i^T x - c - u_i <= 0
      prog.a_ub(i, 0) = -1.0;
      prog.a_ub.row(i).segment(1, d) = -sample.col(i).transpose();
      prog.a_ub(i, 1 + d + i) = -1.0;
    }
    prog.a_ub.row(k).segment(1, d) = -p_.mu.transpose();
    prog.b_ub(k) = -p_.target;
    prog.a_eq = Eigen::MatrixXd::Zero(1, 1 + d + k);
    prog.a_eq.row(0).segment(1, d).setOnes();
    prog.b_eq = Eigen::VectorXd::Ones(1);

    const lp::LpSolution sol = lp::simplex_solve(prog);
    if (sol.status != lp::LpStatus::Optimal) {
      throw std::runtime_error(sol.status == lp::LpStatus::Infeasible
                                   ? "target return infeasible"
                                   : "portfolio LP unbounded");
    }
    Decision x = sol.point.head(1 + d);
    // Clean round-off on the simplex weights.
    x.tail(d) = x.tail(d).cwiseMax(0.0);
    return {sample_average_cost(x, sample), x};
  }

  Eigen::VectorXd draw(RngStream& rng) const override { return mvn_sample(rng, p_.mu, chol_); }

  bool is_feasible(const Decision& x) const override {
    const Index d = dim();
    if (x.size() != 1 + d) return false;
    const auto w = x.tail(d);
    constexpr double tol = 1e-7;
    return w.minCoeff() >= -tol && std::abs(w.sum() - 1.0) <= tol && p_.mu.dot(w) >= p_.target - tol;
  }

  std::optional<double> objective(const Decision& x) const override {
    // -xi^T w ~ N(m, s^2); E[(L - c)_+] = (m - c) Phi((m - c)/s) + s phi((m - c)/s).
    const auto w = x.tail(dim());
    const double c = x(0);
    const double m = -p_.mu.dot(w);
    const double s = std::sqrt(std::max(0.0, w.dot(p_.sigma * w)));
    double excess;
    if (s == 0.0) {
      excess = std::max(m - c, 0.0);
    } else {
      const double z = (m - c) / s;
      excess = (m - c) * normal_cdf(z) + s * normal_pdf(z);
    }
    return c + excess / p_.alpha;
  }

  std::optional<double> true_optimum() const override {
    if (!is_default_) return std::nullopt;
    return constants::portfolio_true_optimum();
  }
  std::optional<Decision> true_solution() const override {
    if (!is_default_) return std::nullopt;
    return constants::portfolio_true_solution();
  }
  std::string truth_tag() const override { return "derived:normal-cvar-kkt"; }

  void mark_default() { is_default_ = true; }

 private:
  PortfolioParams p_;
  Eigen::MatrixXd chol_;
  bool is_default_{false};
};

// ---------------------------------------------------------------------------

class ItemSelection final : public StochasticProgram {
 public:
  explicit ItemSelection(ItemSelectionParams p) : p_(std::move(p)) {
    const Index d = p_.mu.size();
    if (d < 1 || d > 20) throw std::invalid_argument("item selection: 1..20 items supported");
    if (p_.sigma.rows() != d || p_.sigma.cols() != d || p_.a.cols() != d || p_.a.rows() != p_.b.size()) {
      throw std::invalid_argument("item selection: dimension mismatch");
    }
    chol_ = cholesky(p_.sigma);
    std::vector<Eigen::VectorXd> feasible;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      Eigen::VectorXd x(d);
      for (Index i = 0; i < d; ++i) x(i) = (mask >> i) & 1u ? 1.0 : 0.0;
      if (((p_.a * x - p_.b).array() <= 1e-12).all()) feasible.push_back(std::move(x));
    }
    if (feasible.empty()) throw std::invalid_argument("item selection: no feasible binary vector");
    candidates_.resize(d, static_cast<Index>(feasible.size()));
    for (std::size_t j = 0; j < feasible.size(); ++j) candidates_.col(static_cast<Index>(j)) = feasible[j];
  }

  std::string name() const override { return "ip"; }
  Index dim() const override { return p_.mu.size(); }

  double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const override {
    return xi.dot(x);
  }

  SaaSolution solve_saa(const SampleRef& sample) const override {
    require_nonempty(sample, dim());
    const Eigen::VectorXd mean = sample.rowwise().sum() / static_cast<double>(sample.cols());
    return minimize_linear(mean);
  }

  /// argmin over the feasible binaries of cost^T x; first candidate wins ties.
  SaaSolution minimize_linear(const Eigen::VectorXd& cost_vec) const {
    const Eigen::VectorXd values = candidates_.transpose() * cost_vec;
    Index best = 0;
    for (Index j = 1; j < values.size(); ++j) {
      if (values(j) < values(best)) best = j;
    }
    return {values(best), candidates_.col(best)};
  }

  Eigen::VectorXd draw(RngStream& rng) const override { return mvn_sample(rng, p_.mu, chol_); }

  bool is_feasible(const Decision& x) const override {
    if (x.size() != dim()) return false;
    for (Index i = 0; i < x.size(); ++i) {
      if (x(i) != 0.0 && x(i) != 1.0) return false;
    }
    return ((p_.a * x - p_.b).array() <= 1e-12).all();
  }

  std::optional<double> objective(const Decision& x) const override { return p_.mu.dot(x); }
  std::optional<double> true_optimum() const override { return minimize_linear(p_.mu).value; }
  std::optional<Decision> true_solution() const override { return minimize_linear(p_.mu).solution; }

  const Eigen::MatrixXd& candidates() const { return candidates_; }

 private:
  ItemSelectionParams p_;
  Eigen::MatrixXd chol_;
  Eigen::MatrixXd candidates_;
};

// ---------------------------------------------------------------------------

class ToyLp final : public StochasticProgram {
 public:
  std::string name() const override { return "toylp"; }
  Index dim() const override { return 1; }

  double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const override {
    return -0.05 * x(0) + (3.0 - 2.0 * x(0)) * xi(0);
  }

  // Linear on [-1, 1]: g(1) - g(-1) = -0.1 - 4 mean, so x = 1 iff mean >= -0.025.
  SaaSolution solve_saa(const SampleRef& sample) const override {
    require_nonempty(sample, 1);
    const double mean = sample.sum() / static_cast<double>(sample.cols());
    const double x = (-0.1 - 4.0 * mean <= 0.0) ? 1.0 : -1.0;
    Decision d(1);
    d(0) = x;
    return {-0.05 * x + (3.0 - 2.0 * x) * mean, d};
  }

  Eigen::VectorXd draw(RngStream& rng) const override {
    Eigen::VectorXd v(1);
    v(0) = rng.normal();
    return v;
  }

  bool is_feasible(const Decision& x) const override {
    return x.size() == 1 && x(0) >= -1.0 && x(0) <= 1.0;
  }

  std::optional<double> true_optimum() const override { return -0.05; }
  std::optional<Decision> true_solution() const override { return Decision::Ones(1); }
  std::optional<double> objective(const Decision& x) const override { return -0.05 * x(0); }
};

// ---------------------------------------------------------------------------

class GapProgram final : public StochasticProgram {
 public:
  GapProgram(ProgramPtr base, Decision x_hat) : base_(std::move(base)), x_hat_(std::move(x_hat)) {
    if (!base_) throw std::invalid_argument("gap_program: null base");
    if (!base_->is_feasible(x_hat_)) throw std::invalid_argument("infeasible x_hat");
  }

  std::string name() const override { return "gap(" + base_->name() + ")"; }
  Index dim() const override { return base_->dim(); }

  double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const override {
    return base_->cost(x, xi) - base_->cost(x_hat_, xi);
  }

  // The shift is constant in x per scenario, so the argmin is the base one.
  SaaSolution solve_saa(const SampleRef& sample) const override {
    SaaSolution s = base_->solve_saa(sample);
    s.value -= base_->sample_average_cost(x_hat_, sample);
    return s;
  }

  Eigen::VectorXd draw(RngStream& rng) const override { return base_->draw(rng); }
  bool is_feasible(const Decision& x) const override { return base_->is_feasible(x); }

  std::optional<double> objective(const Decision& x) const override {
    const auto zx = base_->objective(x);
    const auto zh = base_->objective(x_hat_);
    if (!zx || !zh) return std::nullopt;
    return *zx - *zh;
  }
  std::optional<double> true_optimum() const override {
    const auto z = base_->true_optimum();
    const auto zh = base_->objective(x_hat_);
    if (!z || !zh) return std::nullopt;
    return *z - *zh;
  }
  std::optional<Decision> true_solution() const override { return base_->true_solution(); }
  std::string truth_tag() const override { return base_->truth_tag(); }

 private:
  ProgramPtr base_;
  Decision x_hat_;
};

}  // namespace

// ---------------------------------------------------------------------------

PortfolioParams PortfolioParams::defaults() {
  return {constants::portfolio_mu(), constants::portfolio_sigma(), constants::kPortfolioAlpha,
          constants::kPortfolioTarget};
}

ItemSelectionParams ItemSelectionParams::defaults() {
  return {constants::item_selection_mu(), constants::item_selection_sigma(),
          constants::item_selection_a(), constants::item_selection_b()};
}

ProgramPtr cvar1d(double alpha1) { return std::make_shared<Cvar1d>(alpha1); }

ProgramPtr portfolio_cvar(const PortfolioParams& params) {
  auto p = std::make_shared<Portfolio>(params);
  const PortfolioParams def = PortfolioParams::defaults();
  if (params.mu == def.mu && params.sigma == def.sigma && params.alpha == def.alpha &&
      params.target == def.target) {
    p->mark_default();
  }
  return p;
}

ProgramPtr item_selection_ip(const ItemSelectionParams& params) {
  return std::make_shared<ItemSelection>(params);
}

ProgramPtr toy_lp() { return std::make_shared<ToyLp>(); }

ProgramPtr gap_program(ProgramPtr base, Decision x_hat) {
  return std::make_shared<GapProgram>(std::move(base), std::move(x_hat));
}

ProgramPtr make_program(std::string_view key) {
  if (key == "cvar") return cvar1d(constants::kCvarAlpha);
  if (key == "portfolio") return portfolio_cvar();
  if (key == "ip") return item_selection_ip();
  if (key == "toylp") return toy_lp();
  throw std::invalid_argument("unknown problem key: " + std::string(key));
}

std::vector<std::string> program_keys() { return {"cvar", "portfolio", "ip", "toylp"}; }

double normal_portfolio_cvar(const PortfolioParams& params, const Eigen::VectorXd& x) {
  const double kappa = normal_pdf(normal_quantile(1.0 - params.alpha)) / params.alpha;
  return -params.mu.dot(x) + std::sqrt(std::max(0.0, x.dot(params.sigma * x))) * kappa;
}

double portfolio_frank_wolfe_gap(const PortfolioParams& params, const Eigen::VectorXd& x) {
  const Index d = params.mu.size();
  if (x.size() != d) throw std::invalid_argument("portfolio_frank_wolfe_gap: dimension mismatch");
  const double kappa = normal_pdf(normal_quantile(1.0 - params.alpha)) / params.alpha;
  const Eigen::VectorXd sx = params.sigma * x;
  const double s = std::sqrt(x.dot(sx));
  if (!(s > 0.0)) throw std::invalid_argument("portfolio_frank_wolfe_gap: zero-variance portfolio");
  const Eigen::VectorXd grad = -params.mu + kappa * sx / s;

  lp::LinearProgram prog(d);
  prog.c = grad;
  prog.a_eq = Eigen::MatrixXd::Ones(1, d);
  prog.b_eq = Eigen::VectorXd::Ones(1);
  prog.a_ub = -params.mu.transpose();
  prog.b_ub = Eigen::VectorXd::Constant(1, -params.target);
  const lp::LpSolution sol = lp::simplex_solve(prog);
  if (sol.status != lp::LpStatus::Optimal) throw std::runtime_error("target return infeasible");
  return grad.dot(x) - sol.value;
}

}  // namespace bagbound

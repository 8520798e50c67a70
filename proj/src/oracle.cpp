#include "bagbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bagbound/parallel.hpp"

namespace bagbound {

namespace {

// C(n, k), saturating above `cap`.
std::int64_t binomial_capped(Index n, Index k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1;
  for (Index i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::int64_t>(std::llround(c));
}

std::int64_t power_capped(Index n, Index k, std::int64_t cap) {
  std::int64_t p = 1;
  for (Index i = 0; i < k; ++i) {
    if (p > cap / n) return cap + 1;
    p *= n;
  }
  return p;
}

void check_k(Index k) {
  if (k < 1) throw std::invalid_argument("oracle: k must be positive");
}

class PiecewiseArms final : public StochasticProgram {
 public:
  explicit PiecewiseArms(Index d) : d_(d) {
    if (d < 2) throw std::invalid_argument("example1: need d >= 2");
  }

  std::string name() const override { return "example1"; }
  Index dim() const override { return d_; }

  double cost(const Decision& x, const Eigen::Ref<const Eigen::VectorXd>& xi) const override {
    const double t = x(0);
    auto j = static_cast<Index>(std::floor(t));
    j = std::clamp<Index>(j, 1, d_ - 1);
    const double w = t - static_cast<double>(j);
    return (1.0 - w) * xi(j - 1) + w * xi(j);
  }

  SaaSolution solve_saa(const SampleRef& sample) const override {
    if (sample.cols() < 1) throw std::invalid_argument("empty sample");
    if (sample.rows() != d_) throw std::invalid_argument("sample dimension mismatch");
    const Eigen::VectorXd mean = sample.rowwise().sum() / static_cast<double>(sample.cols());
    Index best = 0;
    for (Index j = 1; j < d_; ++j) {
      if (mean(j) < mean(best)) best = j;
    }
    Decision x(1);
    x(0) = static_cast<double>(best + 1);
    return {mean(best), x};
  }

  Eigen::VectorXd draw(RngStream& rng) const override {
    Eigen::VectorXd v(d_);
    for (Index j = 0; j < d_; ++j) v(j) = rng.normal();
    return v;
  }

  bool is_feasible(const Decision& x) const override {
    return x.size() == 1 && x(0) >= 1.0 && x(0) <= static_cast<double>(d_);
  }

  std::optional<double> true_optimum() const override { return 0.0; }
  std::optional<double> objective(const Decision& /*x*/) const override { return 0.0; }

  // Each arm mean given the first point is (xi_j + sqrt(k - 1) Z_j) / k.
  double conditional_saa_draw(const Eigen::Ref<const Eigen::VectorXd>& first, Index k,
                              RngStream& rng) const override {
    if (k < 1) throw std::invalid_argument("conditional_saa_draw: k must be >= 1");
    const double s = std::sqrt(static_cast<double>(k - 1));
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < d_; ++j) {
      const double v = first(j) + (k > 1 ? s * rng.normal() : 0.0);
      best = std::min(best, v);
    }
    return best / static_cast<double>(k);
  }

 private:
  Index d_;
};

}  // namespace

OracleEstimate complete_u_statistic(const Dataset& data, Index k, const StochasticProgram& program) {
  check_k(k);
  const Index n = data.size();
  if (k > n) throw std::invalid_argument("oracle: k > n for the U-statistic");
  const std::int64_t total = binomial_capped(n, k, kOracleEvaluationLimit);
  if (total > kOracleEvaluationLimit) throw std::invalid_argument("oracle scale exceeded");

  std::vector<Index> comb(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) comb[static_cast<std::size_t>(j)] = j;
  Eigen::MatrixXd buf(data.dim(), k);
  CompensatedSum<double> sum;
  std::int64_t count = 0;
  for (;;) {
    for (Index j = 0; j < k; ++j) buf.col(j) = data.observation(comb[static_cast<std::size_t>(j)]);
    sum += program.solve_saa(buf).value;
    ++count;
    Index j = k - 1;
    while (j >= 0 && comb[static_cast<std::size_t>(j)] == n - k + j) --j;
    if (j < 0) break;
    ++comb[static_cast<std::size_t>(j)];
    for (Index t = j + 1; t < k; ++t) comb[static_cast<std::size_t>(t)] = comb[static_cast<std::size_t>(t - 1)] + 1;
  }
  return {sum.value() / static_cast<double>(count), 0.0, count, true};
}

OracleEstimate complete_v_statistic(const Dataset& data, Index k, const StochasticProgram& program) {
  check_k(k);
  const Index n = data.size();
  const std::int64_t total = power_capped(n, k, kOracleEvaluationLimit);
  if (total > kOracleEvaluationLimit) throw std::invalid_argument("oracle scale exceeded");

  std::vector<Index> tuple(static_cast<std::size_t>(k), 0);
  Eigen::MatrixXd buf(data.dim(), k);
  CompensatedSum<double> sum;
  std::int64_t count = 0;
  for (;;) {
    for (Index j = 0; j < k; ++j) buf.col(j) = data.observation(tuple[static_cast<std::size_t>(j)]);
    sum += program.solve_saa(buf).value;
    ++count;
    Index j = k - 1;
    while (j >= 0 && tuple[static_cast<std::size_t>(j)] == n - 1) {
      tuple[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
    ++tuple[static_cast<std::size_t>(j)];
  }
  return {sum.value() / static_cast<double>(count), 0.0, count, true};
}

OracleEstimate estimate_wk(const StochasticProgram& program, Index k, Index reps, const RngStream& rng,
                           unsigned threads) {
  if (k < 1) throw std::invalid_argument("estimate_wk: k must be positive");
  if (reps < 100) throw std::invalid_argument("estimate_wk: need reps >= 100");
  std::vector<double> h(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](std::int64_t r) {
    RngStream s = rng.substream(static_cast<std::uint64_t>(r));
    const Dataset sample = program.generate(k, s);
    h[static_cast<std::size_t>(r)] = program.solve_saa(sample.matrix()).value;
  });
  const auto stats = mean_var(std::span<const double>(h));
  return {stats.mean, stats.stderr_of_mean(), reps, false};
}

OracleEstimate estimate_gk_variance(const StochasticProgram& program, Index k, Index outer, Index inner,
                                    const RngStream& rng, unsigned threads) {
  if (k < 1) throw std::invalid_argument("estimate_gk_variance: k must be positive");
  if (outer < 100 || inner < 100) throw std::invalid_argument("estimate_gk_variance: need outer, inner >= 100");
  std::vector<double> means(static_cast<std::size_t>(outer));
  std::vector<double> vars(static_cast<std::size_t>(outer));
  parallel_for(outer, threads, [&](std::int64_t o) {
    RngStream xs = rng.substream({static_cast<std::uint64_t>(o), 0});
    const Eigen::VectorXd xi = program.draw(xs);
    std::vector<double> h(static_cast<std::size_t>(inner));
    for (Index j = 0; j < inner; ++j) {
      RngStream s = rng.substream({static_cast<std::uint64_t>(o), static_cast<std::uint64_t>(1 + j)});
      h[static_cast<std::size_t>(j)] = program.conditional_saa_draw(xi, k, s);
    }
    const auto st = mean_var(std::span<const double>(h));
    means[static_cast<std::size_t>(o)] = st.mean;
    vars[static_cast<std::size_t>(o)] = st.variance;
  });
  const double m_bar = mean_var(std::span<const double>(means), false).mean;
  const double scale = static_cast<double>(outer) / static_cast<double>(outer - 1);
  std::vector<double> t(static_cast<std::size_t>(outer));
  for (Index o = 0; o < outer; ++o) {
    const double dm = means[static_cast<std::size_t>(o)] - m_bar;
    t[static_cast<std::size_t>(o)] = scale * dm * dm - vars[static_cast<std::size_t>(o)] / static_cast<double>(inner);
  }
  const auto st = mean_var(std::span<const double>(t));
  return {st.mean, st.stderr_of_mean(), outer * inner, false};
}

ProgramPtr example1_program(Index d) { return std::make_shared<PiecewiseArms>(d); }

}  // namespace bagbound

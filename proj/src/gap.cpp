#include "bagbound/gap.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

#include "bagbound/programs.hpp"
#include "bagbound/quantiles.hpp"

namespace bagbound {

namespace {

void check_setup(const GapSetup& setup) {
  if (setup.evaluation.size() < 2) throw std::invalid_argument("gap: need n2 >= 2");
  if (!(setup.alpha > 0.0 && setup.alpha < 1.0)) throw std::invalid_argument("gap: alpha must be in (0, 1)");
}

}  // namespace

GapSetup make_gap_setup(const StochasticProgram& program, Dataset training, Dataset evaluation, double alpha) {
  Decision x_hat = program.solve_saa(training.matrix()).solution;
  return GapSetup{std::move(training), std::move(evaluation), std::move(x_hat), alpha};
}

BoundReport lower_bound(const Dataset& data, const StochasticProgram& program, const LowerBoundMethod& method,
                        double alpha, const RngStream& rng) {
  if (const auto* bag = std::get_if<BaggingMethod>(&method)) {
    BagOptions opt;
    opt.k = bag->k;
    opt.bootstrap_size = bag->bootstrap_size;
    opt.alpha = alpha;
    opt.scheme = bag->scheme;
    opt.threads = bag->threads;
    return to_report(bag_bound(data, program, opt, rng));
  }
  if (const auto* batch = std::get_if<BatchingMethod>(&method)) {
    return batching_bound(data, program, batch->k, alpha);
  }
  return single_replication_bound(data, program, alpha);
}

GapReport gap_bound_bc(const GapSetup& setup, const ProgramPtr& program, const LowerBoundMethod& method,
                       const RngStream& rng) {
  check_setup(setup);
  if (!program->is_feasible(setup.x_hat)) throw std::invalid_argument("gap: infeasible x_hat");
  const double half = setup.alpha / 2.0;
  const Index n2 = setup.evaluation.size();
  std::vector<double> h(static_cast<std::size_t>(n2));
  for (Index i = 0; i < n2; ++i) {
    h[static_cast<std::size_t>(i)] = program->cost(setup.x_hat, setup.evaluation.observation(i));
  }
  const auto stats = mean_var(std::span<const double>(h));

  GapReport r;
  r.approach = GapApproach::Bonferroni;
  r.value_mean = stats.mean;
  r.value_std_error = stats.stderr_of_mean();
  r.value_upper = stats.mean + normal_quantile(1.0 - half) * r.value_std_error;
  const Dataset pooled = Dataset::concat(setup.training, setup.evaluation);
  r.lower = lower_bound(pooled, *program, method, half, rng);
  r.upper_bound = r.value_upper - r.lower.bound;
  return r;
}

GapReport gap_bound_crn(const GapSetup& setup, const ProgramPtr& program, const LowerBoundMethod& method,
                        const RngStream& rng) {
  check_setup(setup);
  const ProgramPtr shifted = gap_program(program, setup.x_hat);
  GapReport r;
  r.approach = GapApproach::CommonRandomNumbers;
  r.lower = lower_bound(setup.evaluation, *shifted, method, setup.alpha, rng);
  r.upper_bound = -r.lower.bound;
  return r;
}

}  // namespace bagbound

#include "bagbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "bagbound/parallel.hpp"
#include "bagbound/quantiles.hpp"

namespace bagbound {

namespace {

// Draws k indices into `out`. Without replacement, `perm` must hold the
// identity permutation of size n on entry and holds it again on exit.
void draw_indices(RngStream& rng, Index n, Index k, ResampleScheme scheme, std::vector<Index>& out,
                  std::vector<Index>& perm, std::vector<Index>& swaps) {
  out.resize(static_cast<std::size_t>(k));
  if (scheme == ResampleScheme::WithReplacement) {
    for (Index j = 0; j < k; ++j) {
      out[static_cast<std::size_t>(j)] = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    return;
  }
  swaps.resize(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    const auto r = j + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - j)));
    std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(r)]);
    swaps[static_cast<std::size_t>(j)] = r;
    out[static_cast<std::size_t>(j)] = perm[static_cast<std::size_t>(j)];
  }
  for (Index j = k - 1; j >= 0; --j) {
    std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(swaps[static_cast<std::size_t>(j)])]);
  }
}

void check_resample_args(Index n, Index k, ResampleScheme scheme) {
  if (n < 1) throw std::invalid_argument("resample: n must be positive");
  if (k < 1) throw std::invalid_argument("resample: k must be positive");
  if (scheme == ResampleScheme::WithoutReplacement && k > n) {
    throw std::invalid_argument("resample: k > n without replacement");
  }
}

std::vector<Index> identity_perm(Index n) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  return perm;
}

}  // namespace

std::string to_string(ResampleScheme s) {
  return s == ResampleScheme::WithReplacement ? "with-replacement" : "without-replacement";
}

std::string to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::Bagging:
      return "bagging";
    case BoundMethod::Batching:
      return "batching";
    case BoundMethod::SingleReplication:
      return "single";
  }
  return "unknown";
}

Resample resample_counts(RngStream& rng, Index n, Index k, ResampleScheme scheme) {
  check_resample_args(n, k, scheme);
  Resample out;
  std::vector<Index> perm;
  std::vector<Index> swaps;
  if (scheme == ResampleScheme::WithoutReplacement) perm = identity_perm(n);
  draw_indices(rng, n, k, scheme, out.indices, perm, swaps);
  out.counts = Eigen::VectorXi::Zero(n);
  for (Index i : out.indices) ++out.counts(i);
  return out;
}

Index recommended_bootstrap_size(Index n, Index k) { return 5 * n * k; }

BagOutput bag_bound(const Dataset& data, const StochasticProgram& program, const BagOptions& options,
                    const RngStream& rng) {
  const Index n = data.size();
  const Index k = options.k;
  if (n < 2) throw std::invalid_argument("bagging: need n >= 2");
  if (k < 1) throw std::invalid_argument("bagging: k must be positive");
  if (options.scheme == ResampleScheme::WithoutReplacement && k > n - 1) {
    throw std::invalid_argument("bagging: k must be at most n - 1 without replacement");
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("bagging: alpha must be in (0, 1)");
  const Index recommended = recommended_bootstrap_size(n, k);
  const Index B = options.bootstrap_size == 0 ? recommended : options.bootstrap_size;
  if (B < 2) throw std::invalid_argument("bagging: need B >= 2");

  const Eigen::MatrixXd& obs = data.matrix();
  const Index d = data.dim();
  std::vector<double> z(static_cast<std::size_t>(B));

  const unsigned threads = options.threads == 0 ? 1 : options.threads;
  const Index chunk = 256;
  const Index n_chunks = (B + chunk - 1) / chunk;
  parallel_for(n_chunks, threads, [&](std::int64_t c) {
    std::vector<Index> idx;
    std::vector<Index> swaps;
    std::vector<Index> perm;
    if (options.scheme == ResampleScheme::WithoutReplacement) perm = identity_perm(n);
    Eigen::MatrixXd buf(d, k);
    const Index end = std::min(B, (c + 1) * chunk);
    for (Index b = c * chunk; b < end; ++b) {
      RngStream s = rng.substream(static_cast<std::uint64_t>(b));
      draw_indices(s, n, k, options.scheme, idx, perm, swaps);
      for (Index j = 0; j < k; ++j) buf.col(j) = obs.col(idx[static_cast<std::size_t>(j)]);
      try {
        z[static_cast<std::size_t>(b)] = program.solve_saa(buf).value;
      } catch (const std::exception& e) {
        throw std::runtime_error("bagging: resample " + std::to_string(b) + " failed: " + e.what());
      }
    }
  });

  const auto stats = mean_var(std::span<const double>(z));
  const double z_bag = stats.mean;

  // Accumulate sum_b N_i (Z_b - shift) and sum_b N_i in ascending b. The
  // shift only conditions the sums; it cancels in the covariance.
  const double shift = z[0];
  std::vector<CompensatedSum<double>> nz(static_cast<std::size_t>(n));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  {
    std::vector<Index> idx;
    std::vector<Index> swaps;
    std::vector<Index> perm;
    if (options.scheme == ResampleScheme::WithoutReplacement) perm = identity_perm(n);
    for (Index b = 0; b < B; ++b) {
      RngStream s = rng.substream(static_cast<std::uint64_t>(b));
      draw_indices(s, n, k, options.scheme, idx, perm, swaps);
      const double zb = z[static_cast<std::size_t>(b)] - shift;
      for (Index i : idx) {
        nz[static_cast<std::size_t>(i)] += zb;
        ++counts[static_cast<std::size_t>(i)];
      }
    }
  }

  const auto Bd = static_cast<double>(B);
  CompensatedSum<double> shifted;
  for (double v : z) shifted += v - shift;
  const double shifted_mean = shifted.value() / Bd;
  Eigen::VectorXd cov(n);
  for (Index i = 0; i < n; ++i) {
    const double n_bar = static_cast<double>(counts[static_cast<std::size_t>(i)]) / Bd;
    cov(i) = nz[static_cast<std::size_t>(i)].value() / Bd - n_bar * shifted_mean;
  }
  CompensatedSum<double> ss;
  for (Index i = 0; i < n; ++i) ss += cov(i) * cov(i);
  double var_ij = ss.value();
  if (options.scheme == ResampleScheme::WithoutReplacement) {
    const double f = static_cast<double>(n) / static_cast<double>(n - k);
    var_ij *= f * f;
  }

  BagOutput out;
  out.z_bag = z_bag;
  out.sigma_ij = std::sqrt(var_ij);
  out.quantile = normal_quantile(1.0 - options.alpha);
  out.lower_bound = z_bag - out.quantile * out.sigma_ij;
  out.k = k;
  out.bootstrap_size = B;
  out.n = n;
  out.alpha = options.alpha;
  out.scheme = options.scheme;
  out.per_datum_cov = std::move(cov);
  out.resample_std = stats.stddev();
  out.below_recommended_b = B < recommended;
  return out;
}

Eigen::VectorXd ij_covariance_direct(const std::vector<double>& z, const Eigen::MatrixXi& counts, Index k) {
  const auto B = static_cast<Index>(z.size());
  if (B < 1 || counts.cols() != B) throw std::invalid_argument("ij covariance: size mismatch");
  const Index n = counts.rows();
  const double z_bar = mean_var(std::span<const double>(z), false).mean;
  CompensatedSum<double> residual;
  for (double v : z) residual += v - z_bar;
  const double correction = residual.value() / static_cast<double>(B);
  const double expected = static_cast<double>(k) / static_cast<double>(n);
  Eigen::VectorXd cov(n);
  for (Index i = 0; i < n; ++i) {
    CompensatedSum<double> s;
    for (Index b = 0; b < B; ++b) {
      s += (counts(i, b) - expected) * ((z[static_cast<std::size_t>(b)] - z_bar) - correction);
    }
    cov(i) = s.value() / static_cast<double>(B);
  }
  return cov;
}

BoundReport to_report(const BagOutput& out) {
  BoundReport r;
  r.method = BoundMethod::Bagging;
  r.side = BoundSide::Lower;
  r.bound = out.lower_bound;
  r.point = out.z_bag;
  r.std_error = out.sigma_ij;
  r.quantile = out.quantile;
  r.n = out.n;
  r.k = out.k;
  r.bootstrap_size = out.bootstrap_size;
  r.alpha = out.alpha;
  r.scheme = out.scheme;
  return r;
}

BoundReport batching_bound(const Dataset& data, const StochasticProgram& program, Index k, double alpha) {
  if (k < 1) throw std::invalid_argument("batching: k must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("batching: alpha must be in (0, 1)");
  const Index m = data.size() / k;
  if (m < 2) throw std::invalid_argument("need at least two batches");
  std::vector<double> values(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    values[static_cast<std::size_t>(j)] = program.solve_saa(data.matrix().middleCols(j * k, k)).value;
  }
  const auto stats = mean_var(std::span<const double>(values));
  BoundReport r;
  r.method = BoundMethod::Batching;
  r.side = BoundSide::Lower;
  r.point = stats.mean;
  r.std_error = stats.stderr_of_mean();
  r.quantile = m < 30 ? t_quantile(1.0 - alpha, static_cast<int>(m - 1)) : normal_quantile(1.0 - alpha);
  r.bound = r.point - r.quantile * r.std_error;
  r.n = data.size();
  r.k = k;
  r.batches = m;
  r.alpha = alpha;
  return r;
}

BoundReport single_replication_bound(const Dataset& data, const StochasticProgram& program, double alpha,
                                     const std::optional<Decision>& gap_candidate) {
  const Index n = data.size();
  if (n < 2) throw std::invalid_argument("single replication: need n >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("single replication: alpha must be in (0, 1)");
  const SaaSolution sol = program.solve_saa(data.matrix());
  std::vector<double> values(static_cast<std::size_t>(n));
  BoundReport r;
  r.method = BoundMethod::SingleReplication;
  r.n = n;
  r.k = n;
  r.alpha = alpha;
  r.quantile = normal_quantile(1.0 - alpha);
  if (!gap_candidate) {
    for (Index i = 0; i < n; ++i) {
      values[static_cast<std::size_t>(i)] = program.cost(sol.solution, data.observation(i));
    }
    const auto stats = mean_var(std::span<const double>(values));
    r.side = BoundSide::Lower;
    r.point = sol.value;
    r.std_error = stats.stderr_of_mean();
    r.bound = r.point - r.quantile * r.std_error;
    return r;
  }
  const Decision& x_hat = *gap_candidate;
  if (!program.is_feasible(x_hat)) throw std::invalid_argument("single replication: infeasible x_hat");
  CompensatedSum<double> h_hat;
  for (Index i = 0; i < n; ++i) {
    const double a = program.cost(x_hat, data.observation(i));
    h_hat += a;
    values[static_cast<std::size_t>(i)] = a - program.cost(sol.solution, data.observation(i));
  }
  const auto stats = mean_var(std::span<const double>(values));
  r.side = BoundSide::Upper;
  r.point = h_hat.value() / static_cast<double>(n) - sol.value;
  r.std_error = stats.stderr_of_mean();
  r.bound = r.point + r.quantile * r.std_error;
  return r;
}

}  // namespace bagbound

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bagbound {

using Index = Eigen::Index;

/// Neumaier-compensated running sum. Adding in a fixed order gives a fixed
/// result, which is what every resample average in this library relies on.
template <typename Scalar = double>
class CompensatedSum {
 public:
  CompensatedSum() = default;

  void add(Scalar v) {
    const Scalar t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Scalar v) {
    add(v);
    return *this;
  }

  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

/// An immutable i.i.d. sample. Observations are stored as the columns of a
/// d x n matrix so each observation is contiguous.
class Dataset {
 public:
  explicit Dataset(Eigen::MatrixXd observations);

  /// One-dimensional convenience constructor.
  static Dataset from_scalars(std::span<const double> values);

  Index size() const { return obs_.cols(); }
  Index dim() const { return obs_.rows(); }

  auto observation(Index i) const { return obs_.col(i); }
  const Eigen::MatrixXd& matrix() const { return obs_; }

  /// Observations [first, first + count) as a new dataset.
  Dataset slice(Index first, Index count) const;
  /// Concatenation in argument order.
  static Dataset concat(const Dataset& a, const Dataset& b);

 private:
  Eigen::MatrixXd obs_;
};

template <typename Scalar = double>
struct SummaryStats {
  Scalar mean{0};
  Scalar variance{0};
  std::size_t count{0};

  Scalar stddev() const { return std::sqrt(variance); }
  Scalar stderr_of_mean() const {
    return std::sqrt(variance / static_cast<Scalar>(count));
  }
};

/// Two-pass mean and unbiased variance with compensated accumulation.
/// With `need_variance == false` a single value is accepted and the variance
/// is reported as 0.
template <typename Scalar>
SummaryStats<Scalar> mean_var(std::span<const Scalar> values,
                              bool need_variance = true) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  if (need_variance && values.size() < 2) {
    throw std::invalid_argument("need >=2 values");
  }
  CompensatedSum<Scalar> s;
  for (Scalar v : values) s += v;
  const auto count = values.size();
  const Scalar mean = s.value() / static_cast<Scalar>(count);
  Scalar variance{0};
  if (count >= 2) {
    CompensatedSum<Scalar> ss;
    CompensatedSum<Scalar> sd;
    for (Scalar v : values) {
      ss += (v - mean) * (v - mean);
      sd += v - mean;
    }
    // Corrected two-pass formula: subtracts the residual rounding of the mean.
    const Scalar n = static_cast<Scalar>(count);
    variance = (ss.value() - sd.value() * sd.value() / n) / (n - 1);
    if (variance < 0) variance = 0;
  }
  return {mean, variance, count};
}

inline SummaryStats<double> mean_var(const std::vector<double>& values,
                                     bool need_variance = true) {
  return mean_var(std::span<const double>(values), need_variance);
}

}  // namespace bagbound

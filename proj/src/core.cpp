#include "bagbound/core.hpp"

namespace bagbound {

Dataset::Dataset(Eigen::MatrixXd observations) : obs_(std::move(observations)) {
  if (obs_.cols() < 1) throw std::invalid_argument("dataset needs n >= 1");
  if (obs_.rows() < 1) throw std::invalid_argument("dataset needs d >= 1");
}

Dataset Dataset::from_scalars(std::span<const double> values) {
  Eigen::MatrixXd m(1, static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(0, static_cast<Index>(i)) = values[i];
  }
  return Dataset(std::move(m));
}

Dataset Dataset::slice(Index first, Index count) const {
  if (first < 0 || count < 1 || first + count > size()) {
    throw std::out_of_range("dataset slice out of range");
  }
  return Dataset(obs_.middleCols(first, count));
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::MatrixXd m(a.dim(), a.size() + b.size());
  m << a.matrix(), b.matrix();
  return Dataset(std::move(m));
}

}  // namespace bagbound

#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "bagbound/rng.hpp"

namespace bagbound {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Lower-triangular Cholesky factor L with S = L L^T.
///
/// Only the lower triangle of `s` is read. A pivot at or below
/// 1e-12 * max|S| is rejected as not positive definite.
template <typename Derived>
MatrixX<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() != s.cols()) throw std::invalid_argument("cholesky: matrix not square");
  const Eigen::Index d = s.rows();
  const Scalar scale = s.cwiseAbs().maxCoeff();
  const Scalar pivot_floor = Scalar(1e-12) * scale;
  MatrixX<Scalar> l = MatrixX<Scalar>::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Scalar diag = s(j, j) - l.row(j).head(j).squaredNorm();
    if (!(diag > pivot_floor)) throw std::domain_error("matrix not positive definite");
    const Scalar ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < d; ++i) {
      l(i, j) = (s(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return l;
}

/// mu + L z with z a vector of independent standard normals drawn from `rng`.
template <typename DerivedMu, typename DerivedL>
VectorX<typename DerivedMu::Scalar> mvn_sample(RngStream& rng,
                                               const Eigen::MatrixBase<DerivedMu>& mu,
                                               const Eigen::MatrixBase<DerivedL>& l) {
  using Scalar = typename DerivedMu::Scalar;
  if (mu.cols() != 1 || l.rows() != mu.rows() || l.cols() != mu.rows()) {
    throw std::invalid_argument("mvn_sample: dimension mismatch");
  }
  VectorX<Scalar> z(mu.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = static_cast<Scalar>(rng.normal());
  return mu + l.template triangularView<Eigen::Lower>() * z;
}

}  // namespace bagbound

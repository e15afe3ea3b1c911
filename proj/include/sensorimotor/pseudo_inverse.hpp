#pragma once

#include <algorithm>
#include <limits>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "sensorimotor/errors.hpp"

namespace sensorimotor {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Cutoff used when the caller passes a tolerance of zero:
/// max(rows, cols) * epsilon * largest singular value.
template <typename Scalar>
Scalar default_singular_cutoff(Eigen::Index rows, Eigen::Index cols, Scalar largest_singular) {
  return static_cast<Scalar>(std::max(rows, cols)) * std::numeric_limits<Scalar>::epsilon() *
         largest_singular;
}

/// Moore-Penrose pseudo-inverse via a thin SVD. Singular values at or below
/// `tolerance` are treated as zero; a tolerance of 0 selects the default cutoff.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> pseudo_inverse(const Eigen::MatrixBase<Derived>& a,
                                                     typename Derived::Scalar tolerance = 0) {
  using Scalar = typename Derived::Scalar;
  if (tolerance < 0) throw UsageError("pseudo_inverse: tolerance must be non-negative");
  if (!a.allFinite()) throw NumericError("pseudo_inverse: matrix has non-finite entries");

  if (a.size() == 0) return DenseMatrix<Scalar>::Zero(a.cols(), a.rows());

  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const Scalar largest = sigma.size() > 0 ? sigma(0) : Scalar(0);
  const Scalar cutoff =
      tolerance > 0 ? tolerance : default_singular_cutoff(a.rows(), a.cols(), largest);

  DenseVector<Scalar> inv_sigma(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    inv_sigma(i) = sigma(i) > cutoff ? Scalar(1) / sigma(i) : Scalar(0);
  }
  return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace sensorimotor
